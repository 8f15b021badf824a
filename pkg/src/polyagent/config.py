import os

LENS_GUARD = 10**6
POLICY_GUARD = 10**5

EPS_NORM = 1e-9
EPS_LAW = 1e-9
EPS_STRICT = 1e-12


def guard(default):
    """Size guard, overridable via the POLYAGENT_GUARD environment variable."""
    value = os.environ.get("POLYAGENT_GUARD")
    if value:
        return int(float(value))
    return default
