"""Brute-force reference decoder, written from the positional definitions only.

Everything here works on plain Python lists and shares no code with the
package under test.
"""

OPS = ("circular_shift", "transpose", "set_to", "do_nothing",
       "right_shift", "add_one", "left_shift", "subtract_one")


def ref_window(op, x):
    l = len(x)
    name = OPS[op]
    if name == "circular_shift":
        return [x[l - 1]] + [x[i - 1] for i in range(1, l)]
    if name == "transpose":
        return [x[l - 1 - i] for i in range(l)]
    if name == "set_to":
        return [x[0]] * l
    if name == "do_nothing":
        return list(x)
    if name == "right_shift":
        return [x[0]] + [x[i - 1] for i in range(1, l)]
    if name == "left_shift":
        return [x[i + 1] for i in range(l - 1)] + [0]
    if name == "add_one":
        y, carry = [0] * l, 1
        for i in range(l - 1, -1, -1):
            s = x[i] + carry
            y[i], carry = s % 2, s // 2
        if carry:
            # l+1 bit result 1 y[0..l-1]; the least significant bit is dropped
            return [1] + y[:-1]
        return y
    # subtract_one with borrow; a final borrow wraps around
    y, borrow = [0] * l, 1
    for i in range(l - 1, -1, -1):
        d = x[i] - borrow
        if d < 0:
            y[i], borrow = d + 2, 1
        else:
            y[i], borrow = d, 0
    return y


def ref_grow(genotype, tags):
    """``tags`` maps position -> tag byte (0..255)."""
    g = [int(b) for b in genotype]
    out = list(g)
    k = 0
    while k < len(g):
        if k not in tags:
            k += 1
            continue
        op, size = tags[k] >> 5, tags[k] & 31
        size = size or 32
        end = min(k + size, len(g))
        out[k:end] = ref_window(op, g[k:end])
        k = end
    return out
