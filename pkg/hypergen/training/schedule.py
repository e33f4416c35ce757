import math

from ..errors import InputError


def batch_count(n_rows, batch_size):
    return math.ceil(n_rows / batch_size)


def batch_counts(portions, base_batches):
    if base_batches < 1:
        raise InputError(f"base_batches must be >= 1, got {base_batches}")
    for portion in portions:
        if not portion > 0:
            raise InputError(f"portions must be positive, got {portion}")
    counts = [int(round(portion * base_batches)) for portion in portions]
    if sum(counts) == 0:
        raise InputError(f"portions {list(portions)} with base {base_batches} schedule no batches")
    return counts


def balance_tasks(portions, base_batches, rng):
    """One epoch of ``(pair index, batch index)`` in seeded random order.

    Pair ``i`` contributes ``round(portions[i] * base_batches)`` batches.
    """
    counts = batch_counts(portions, base_batches)
    schedule = [(i, b) for i, count in enumerate(counts) for b in range(count)]
    order = rng.permutation(len(schedule))
    return [schedule[j] for j in order]


def plan_batches(n_rows, batch_size, count, rng):
    """``count`` row-index batches, cycling through fresh shuffles when the data runs out."""
    if n_rows < 1:
        raise InputError("cannot batch an empty split")
    batches = []
    while len(batches) < count:
        order = rng.permutation(n_rows)
        for start in range(0, n_rows, batch_size):
            batches.append(order[start:start + batch_size])
            if len(batches) == count:
                break
    return batches


def iterate_minibatches(n_rows, batch_size, rng):
    """Single shuffled pass over ``n_rows``."""
    return plan_batches(n_rows, batch_size, batch_count(n_rows, batch_size), rng)
