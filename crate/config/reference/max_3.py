numbers = [int(input()) for _ in range(3)]
print(max(numbers))
