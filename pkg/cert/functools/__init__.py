from functools import wraps

def memoize(fn):
    '''
    Memoization wrapper for functions whose positional arguments are all
    hashable. Can be applied as a decorator or at runtime. The cache is
    exposed as ``fn.cache`` and can be dropped with ``fn.cache.clear()``.

    :param fn: Function
    :type fn: function
    :returns: Memoized function
    :rtype: function
    '''
    @wraps(fn)
    def memoized_fn(*args):
        if args not in memoized_fn.cache:
            memoized_fn.cache[args] = fn(*args)
        return memoized_fn.cache[args]
    # propagate function attributes in the event that
    # this is applied as a function and not a decorator
    for attr, value in iter(fn.__dict__.items()):
        setattr(memoized_fn, attr, value)
    memoized_fn.cache = {}
    return memoized_fn

def memoize_method(fn):
    '''
    Per-instance memoization for methods. Each instance keeps its own
    cache in ``instance._memo[<method name>]`` so that caches die with
    the instance.

    :param fn: Method
    :type fn: function
    :returns: Memoized method
    :rtype: function
    '''
    name = fn.__name__
    @wraps(fn)
    def memoized_method(self, *args):
        cache = self.__dict__.setdefault('_memo', {}).setdefault(name, {})
        try:
            return cache[args]
        except KeyError:
            result = cache[args] = fn(self, *args)
            return result
    return memoized_method
