def place(s):
    if len(s) <= 2:
        return s
    return s[0] + "(" + place(s[1:-1]) + ")" + s[-1]


line = input().strip()
print(place(line))
