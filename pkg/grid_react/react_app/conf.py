"""
Tolerances and defaults of the detection toolkit.

Deployments override entries through the `GRID_REACT` dict in Django settings;
missing keys take the values in `DEFAULTS`. Numerical entry points read them via
`resolve()` whenever a tolerance keyword is left as None.
"""
from django.conf import settings
from django.core.signals import setting_changed

DEFAULTS = {
    # DC power flow: absolute infinity-norm residual of A theta = p.
    'TOL_SOLVE': 1e-8,
    # Support tests, relative to max(1, |v|_inf).
    'TOL_SUPP': 1e-6,
    # Simplex feasibility and reduced-cost tolerance.
    'TOL_LP': 1e-7,
    # Relative residual under which the fit outside a candidate area counts as solvable.
    'TOL_FEAS': 1e-6,
    # Support of the recovered failure vector, relative to max(1, |x|_inf).
    'TOL_X': 1e-6,
    'CONFIDENCE_THRESHOLD': 99.99,
    'CONFIDENCE_SLACK': 1e-9,
    'WEIGHT_RATE': 1.0,
    'DEFAULT_T': 20,
    # Attack defaults as fractions of |theta|_inf and |p_outside|_inf.
    'SIGMA_FACTOR': 0.1,
    'PERTURBATION_FACTOR': 0.2,
    'LP_MAX_ITERATIONS': 5000,
    'LP_STALL_ITERATIONS': 50,
    'PHASE_ERROR_EPS': 1e-12,
    'DEFAULT_JOBS': 1,
}


class GridReactSettings:
    """
    Lazy accessor for the GRID_REACT settings dict.

    Attribute access returns the user value when present, otherwise the default.
    Unknown names raise AttributeError.
    """

    def __init__(self, defaults=None):
        self.defaults = defaults or DEFAULTS
        self._cached_attrs = set()

    @property
    def user_settings(self):
        if not hasattr(self, '_user_settings'):
            self._user_settings = getattr(settings, 'GRID_REACT', {})
        return self._user_settings

    def __getattr__(self, attr):
        if attr not in self.defaults:
            raise AttributeError("Invalid GRID_REACT setting: '%s'" % attr)

        try:
            val = self.user_settings[attr]
        except KeyError:
            val = self.defaults[attr]

        self._cached_attrs.add(attr)
        setattr(self, attr, val)
        return val

    def reload(self):
        for attr in self._cached_attrs:
            delattr(self, attr)
        self._cached_attrs.clear()
        if hasattr(self, '_user_settings'):
            delattr(self, '_user_settings')


grid_react_settings = GridReactSettings(DEFAULTS)


def resolve(value, name):
    """Return `value` unless it is None, in which case read setting `name`."""
    return getattr(grid_react_settings, name) if value is None else value


def reload_grid_react_settings(*args, **kwargs):
    if kwargs['setting'] == 'GRID_REACT':
        grid_react_settings.reload()


setting_changed.connect(reload_grid_react_settings)
