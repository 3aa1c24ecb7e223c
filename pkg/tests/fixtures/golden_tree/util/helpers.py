def route(code, total):
    if code == 1:
        total = total + 1
    if code == 2:
        total = total - 2
    if code == 3:
        total = total * 3
    if code == 4:
        total = total / 4
    if code == 5:
        total = total // 5
    if code == 6:
        total = total % 6
    if code == 7:
        total = total ** 7
    if code == 8:
        total = total & 8
    if code == 9:
        total = total | 9
    if code == 10:
        total = total ^ 10
    if code == 11:
        total = total >> 11
    return total


def clamp(v, lo, hi):
    if v < lo:
        return lo
    if v > hi:
        return hi
    return v
