votes = [int(input()) for _ in range(3)]
print(1 if sum(votes) >= 2 else 0)
