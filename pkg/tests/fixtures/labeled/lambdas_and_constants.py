square = lambda x: x * x

NAMES = ["ada", "grace"]


def apply_all(fns, value):
    return [fn(value) for fn in fns]
