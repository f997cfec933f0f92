"""
JIT decorators for the hot loops (eikonal marching and sweeping).

Falls back to plain Python when Numba is not installed: same results, much slower.
"""

__all__ = ['njit', 'NUMBA_AVAILABLE']

try:
    from numba import njit

    NUMBA_AVAILABLE = True
except ImportError:
    NUMBA_AVAILABLE = False

    def njit(*args, **kwargs):
        # bare ``@njit`` passes the function itself
        if len(args) == 1 and callable(args[0]) and not kwargs:
            return args[0]

        def decorator(func):
            return func

        return decorator
