a = int(input())
b = int(input())
n = int(input())
total = (a * 100 + b) * n
print(total // 100, total % 100)
