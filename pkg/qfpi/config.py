"""
Flat ``key = value`` configuration files.

Keys match the command-line flag names with dashes replaced by
underscores. ``#`` starts a comment; blank lines are ignored.

.. code-block:: ini

    # transmittance landscape at low power
    p_inc = 0.001
    axis1 = L 0 1 65
    axis2 = dw -3 3 65
"""

import configparser

from qfpi.errors import InvalidParameterError
from qfpi.solver import SolverSettings

_SECTION = "qfpi"

FLOAT_KEYS = {"p_inc", "length", "dw1", "dw2", "gamma1", "gamma2",
              "damping", "rel_tol", "abs_tol", "continuation_below",
              "length_min", "length_max", "dw1_min", "dw1_max"}
INT_KEYS = {"n_samples", "nb_jobs", "max_iterations", "n_seeds",
            "continuation_steps", "seed", "n_coarse", "n_refine", "rounds",
            "scan_grid"}
BOOL_KEYS = {"strict", "tie_dw1"}
STR_KEYS = {"direction", "out", "axis1", "axis2", "outputs"}

SOLVER_KEYS = ("damping", "rel_tol", "abs_tol", "max_iterations", "n_seeds",
               "continuation_steps", "continuation_below", "seed", "scan_grid")

KNOWN_KEYS = FLOAT_KEYS | INT_KEYS | BOOL_KEYS | STR_KEYS


def parse_config(text, source="<string>"):
    """
    Parse the content of a configuration file into a dictionary of typed
    values

    >>> parse_config("p_inc = 1e-3\\nstrict = yes")
    {'p_inc': 0.001, 'strict': True}
    """
    cp = configparser.ConfigParser(inline_comment_prefixes=("#",),
                                   interpolation=None)
    try:
        cp.read_string(f"[{_SECTION}]\n{text}", source=source)
    except configparser.Error as e:
        raise InvalidParameterError(f"{source}: {e}") from e
    section = cp[_SECTION]
    values = {}
    for key in section:
        if key not in KNOWN_KEYS:
            raise InvalidParameterError(f"{source}: unknown configuration key '{key}'")
        try:
            if key in FLOAT_KEYS:
                values[key] = section.getfloat(key)
            elif key in INT_KEYS:
                values[key] = section.getint(key)
            elif key in BOOL_KEYS:
                values[key] = section.getboolean(key)
            else:
                values[key] = section[key].strip()
        except ValueError as e:
            raise InvalidParameterError(f"{source}: invalid value for '{key}': {e}") from e
    return values


def load_config(path):
    with open(path) as fp:
        return parse_config(fp.read(), source=path)


def merge(*layers):
    """
    Merge dictionaries of settings, later ones taking precedence; ``None``
    values are ignored so that unset command-line flags do not override
    file values.
    """
    values = {}
    for layer in layers:
        values.update({k: v for k, v in layer.items() if v is not None})
    return values


def solver_settings(values):
    """
    :py:class:`qfpi.solver.SolverSettings` from the solver keys of
    ``values``, defaults for the others
    """
    return SolverSettings(**{k: values[k] for k in SOLVER_KEYS if k in values})


def parse_outputs(text):
    """
    >>> sorted(parse_outputs("rectify, p1"))
    ['p1', 'rectify']
    """
    return frozenset(t for t in text.replace(",", " ").split())
