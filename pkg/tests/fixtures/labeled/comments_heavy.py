# Module-level banner comment
# spanning two lines.

TIMEOUT = 5  # seconds


def wait(times):  # trailing comment on the def line
    # leading comment
    total = 0
    for t in times:  # inline loop comment
        total += t  # accumulate
    return min(total, TIMEOUT)
