n = int(input())
numbers = list(map(int, input().split()))[:n]
print("YES" if 0 in numbers else "NO")
