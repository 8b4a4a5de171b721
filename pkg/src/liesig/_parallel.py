import os

from joblib import Parallel, delayed

THREADS_ENV = "LIESIG_THREADS"


def resolve_n_jobs(n_jobs=None) -> int:
    """Explicit ``n_jobs`` wins, then ``$LIESIG_THREADS``, then 1."""
    if n_jobs is not None:
        return int(n_jobs)
    value = os.environ.get(THREADS_ENV, "").strip()
    if not value:
        return 1
    try:
        n = int(value)
    except ValueError:
        raise ValueError(f"{THREADS_ENV} must be an integer, got {value!r}") from None
    return max(n, 1)


def parallel_map(func, items, n_jobs=None):
    """Ordered map, run with joblib when more than one worker is allowed."""
    items = list(items)
    n = resolve_n_jobs(n_jobs)
    if n == 1 or len(items) < 2:
        return [func(x) for x in items]
    return Parallel(n_jobs=min(n, len(items)))(delayed(func)(x) for x in items)
