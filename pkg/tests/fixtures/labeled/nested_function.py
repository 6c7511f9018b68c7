def outer(xs):
    def helper(x):
        return x * 2

    return [helper(x) for x in xs]
