import cert

class Session(object):
    '''
    Binds a ``Settings`` tuple so that its defaults need not be passed to
    every engine function. Explicit keyword arguments still win.
    '''
    def __init__(self, settings):
        self._settings = settings
        self.seed = settings.seed

    @property
    def settings(self):
        return self._settings

    def _with(self, kwargs, **defaults):
        for key, value in defaults.items():
            kwargs.setdefault(key, value)
        return kwargs

    def parse(self, *args, **kwargs):
        t = cert.parse(*args, **kwargs)
        return cert.desugar(t, lower=self._settings.lower)

    def typecheck(self, *args, **kwargs):
        return cert.check_program(*args, **kwargs)

    def run_once(self, t, fuel=None, rng=None, args=()):
        fuel = self._settings.fuel if fuel is None else fuel
        rng = rng or cert.RngState(self._settings.seed)
        return cert.run_once(t, fuel, rng, args)

    def estimate(self, t, **kwargs):
        s = self._settings
        return cert.estimate(t, **self._with(kwargs, samples=s.samples, fuel=s.fuel, seed=s.seed))

    def estimate_parallel(self, t, seeds, **kwargs):
        s = self._settings
        return cert.estimate_parallel(t, seeds=seeds, **self._with(kwargs, samples=s.samples, fuel=s.fuel))

    def eval_cost(self, t, **kwargs):
        return cert.eval_cost(t, **self._with(kwargs, depth=self._settings.depth))

    def eval_ec(self, t, **kwargs):
        return cert.eval_ec(t, **self._with(kwargs, depth=self._settings.depth))

    def eval_pre(self, t, reward=None, **kwargs):
        return cert.eval_pre(t, reward, **self._with(kwargs, depth=self._settings.depth))

    def analyze(self, t, **kwargs):
        s = self._settings
        return cert.analyze(t, **self._with(kwargs, tol=s.tol, max_depth=s.max_depth))

    def check_factorization(self, t, reward=None, **kwargs):
        return cert.check_factorization(t, reward, **self._with(kwargs, depth=self._settings.depth))

    def normalize(self, *args, **kwargs):
        return cert.normalize(*args, **kwargs)

    def apply_rule(self, *args, **kwargs):
        return cert.apply_rule(*args, **kwargs)

    def check_preservation(self, t, u, **kwargs):
        s = self._settings
        return cert.check_preservation(t, u, **self._with(kwargs, depth=s.depth, tol=s.tol,
                                                          max_depth=s.max_depth))

    def crosscheck(self, entry, **kwargs):
        s = self._settings
        return cert.crosscheck(entry, **self._with(kwargs, depth=s.depth, samples=s.samples,
                                                   seed=s.seed, fuel=s.fuel, tol=s.tol))

    def monad_law_suite(self, **kwargs):
        return cert.monad_law_suite(**self._with(kwargs, seed=self._settings.seed))

    def __enter__(self):
        return self

    def __exit__(self, type, value, traceback):
        cert.corpus.clear_cache()
        return
