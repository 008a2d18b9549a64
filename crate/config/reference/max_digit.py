digits = input().strip()
print(max(digits))
