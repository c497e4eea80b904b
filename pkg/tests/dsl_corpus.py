"""Random expression corpus and finite differences for derivative checks."""
import numpy as np

from pulsesync.expr import eval_expr

_LEAVES = ("phi", "eps", "0.5", "2", "pi", "1.25")


def random_expr(rng, depth):
    """Random DSL string, finite and smooth for phi, eps in (0, 1)."""
    if depth == 0 or rng.random() < 0.2:
        return str(rng.choice(_LEAVES))
    a = random_expr(rng, depth - 1)
    kind = rng.integers(0, 15)
    if kind < 4:
        b = random_expr(rng, depth - 1)
        return f"({a}) {'+-*'[kind % 3]} ({b})"
    if kind == 4:
        return f"({a}) / (1 + ({random_expr(rng, depth - 1)})^2)"
    # powers act on bounded bases so nesting cannot blow up the frequency
    if kind == 5:
        return f"(1.5 + sin({a}))^{rng.choice(['2', '-1', '0.5', '1.5'])}"
    if kind == 6:
        return f"atan({a})^{rng.choice(['2', '3'])}"
    if kind == 7:
        return f"sin({a})"
    if kind == 8:
        return f"cos({a})"
    if kind == 9:
        return f"tan(0.5*sin({a}))"
    if kind == 10:
        return f"atan({a})"
    if kind == 11:
        return f"sqrt(1 + ({a})^2)"
    if kind == 12:
        return f"exp(sin({a}))"
    if kind == 13:
        return f"log(2 + sin({a}))"
    return f"-({a})"


def corpus(n=200, depth=6, seed=20240611):
    rng = np.random.default_rng(seed)
    return [random_expr(rng, depth) for _ in range(n)]


def fd_derivative(e, var, phi, eps, h=1e-4):
    """Five-point central difference of an expression in one variable."""

    def f(t):
        return eval_expr(e, phi + t, eps) if var == "phi" else eval_expr(e, phi, eps + t)
    return (f(-2 * h) - 8 * f(-h) + 8 * f(h) - f(2 * h)) / (12 * h)
