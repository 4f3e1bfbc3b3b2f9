"""Exact rational algebra for polynomial and piecewise-symmetric kernels on [0,1]^2.

A piecewise-symmetric kernel has the form ``a*|x-y| + L(min(x,y), max(x,y))``
with ``L`` a bivariate polynomial.  Everything here runs on
``fractions.Fraction`` so identities can be checked with zero tolerance.
"""

from fractions import Fraction
from numbers import Rational

DEGREE_CAP = 8


class KernelError(ValueError):
    pass


class OutOfDomain(KernelError):
    pass


class DegreeCapExceeded(KernelError):
    pass


def as_fraction(v):
    """Coerce ints, Fractions and "p/q" strings to Fraction.  Floats are refused."""
    if isinstance(v, Fraction):
        return v
    if isinstance(v, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(v, (int, Rational)):
        return Fraction(v)
    if isinstance(v, str):
        s = v.strip()
        if not s:
            raise ValueError("empty rational")
        return Fraction(s)
    raise TypeError(f"expected an exact rational, got {type(v).__name__}")


def frac_str(q):
    return str(Fraction(q))


class Polynomial1D:
    """Univariate polynomial with Fraction coefficients, lowest degree first."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs=()):
        cs = [as_fraction(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        self.coeffs = tuple(cs)

    @classmethod
    def monomial(cls, k, c=1):
        return cls([0] * k + [c])

    @classmethod
    def constant(cls, c):
        return cls([c])

    @property
    def degree(self):
        # the zero polynomial gets degree -1
        return len(self.coeffs) - 1

    def is_zero(self):
        return not self.coeffs

    def coeff(self, k):
        return self.coeffs[k] if 0 <= k < len(self.coeffs) else Fraction(0)

    def __add__(self, other):
        other = _as_poly1(other)
        n = max(len(self.coeffs), len(other.coeffs))
        return Polynomial1D([self.coeff(k) + other.coeff(k) for k in range(n)])

    __radd__ = __add__

    def __neg__(self):
        return Polynomial1D([-c for c in self.coeffs])

    def __sub__(self, other):
        return self + (-_as_poly1(other))

    def __rsub__(self, other):
        return _as_poly1(other) - self

    def __mul__(self, other):
        if not isinstance(other, Polynomial1D):
            c = as_fraction(other)
            return Polynomial1D([c * a for a in self.coeffs])
        if self.is_zero() or other.is_zero():
            return Polynomial1D()
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
        return Polynomial1D(out)

    __rmul__ = __mul__

    def __eq__(self, other):
        if isinstance(other, Polynomial1D):
            return self.coeffs == other.coeffs
        try:
            return self == _as_poly1(other)
        except TypeError:
            return NotImplemented

    def __hash__(self):
        return hash(self.coeffs)

    def __call__(self, x):
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc if self.coeffs else Fraction(0) * x

    def derivative(self):
        return Polynomial1D([k * c for k, c in enumerate(self.coeffs)][1:])

    def antiderivative(self):
        return Polynomial1D([0] + [c / (k + 1) for k, c in enumerate(self.coeffs)])

    def integral01(self):
        return sum((c / (k + 1) for k, c in enumerate(self.coeffs)), Fraction(0))

    def to_floats(self):
        return [float(c) for c in self.coeffs]

    def to_json(self):
        return [frac_str(c) for c in self.coeffs]

    @classmethod
    def from_json(cls, data):
        return cls([as_fraction(c) for c in data])

    def __repr__(self):
        if not self.coeffs:
            return "0"
        parts = []
        for k, c in enumerate(self.coeffs):
            if c == 0:
                continue
            mono = "" if k == 0 else ("x" if k == 1 else f"x^{k}")
            if mono and abs(c) == 1:
                s = ("-" if c < 0 else "+") + mono
            else:
                s = f"{'+' if c >= 0 else '-'}{abs(c)}" + (f"*{mono}" if mono else "")
            parts.append(s)
        out = "".join(parts)
        return out[1:] if out.startswith("+") else out


def _as_poly1(v):
    if isinstance(v, Polynomial1D):
        return v
    return Polynomial1D([as_fraction(v)])


def second_derivative_in_x(u):
    return u.derivative().derivative()


def inner_product(f, g):
    """<f, g> = int_0^1 f g dx, exact."""
    return (_as_poly1(f) * _as_poly1(g)).integral01()


class BivariatePoly:
    """Sparse polynomial sum c_ij x^i y^j with Fraction coefficients."""

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        clean = {}
        for (i, j), c in (terms or {}).items():
            c = as_fraction(c)
            if i < 0 or j < 0:
                raise ValueError("negative exponent")
            if c:
                clean[(int(i), int(j))] = c
        self.terms = clean

    @classmethod
    def constant(cls, c):
        return cls({(0, 0): c})

    @classmethod
    def from_factors(cls, f, g):
        """f(x) * g(y) for univariate f, g."""
        f, g = _as_poly1(f), _as_poly1(g)
        return cls({(i, j): a * b for i, a in enumerate(f.coeffs) for j, b in enumerate(g.coeffs)})

    @classmethod
    def in_x(cls, f):
        return cls({(i, 0): a for i, a in enumerate(_as_poly1(f).coeffs)})

    @classmethod
    def in_y(cls, f):
        return cls({(0, j): a for j, a in enumerate(_as_poly1(f).coeffs)})

    def coeff(self, i, j):
        return self.terms.get((i, j), Fraction(0))

    def is_zero(self):
        return not self.terms

    def __add__(self, other):
        other = _as_bipoly(other)
        out = dict(self.terms)
        for k, c in other.terms.items():
            out[k] = out.get(k, 0) + c
        return BivariatePoly(out)

    __radd__ = __add__

    def __neg__(self):
        return BivariatePoly({k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-_as_bipoly(other))

    def __rsub__(self, other):
        return _as_bipoly(other) - self

    def __mul__(self, other):
        if not isinstance(other, BivariatePoly):
            c = as_fraction(other)
            return BivariatePoly({k: c * v for k, v in self.terms.items()})
        out = {}
        for (i, j), a in self.terms.items():
            for (k, l), b in other.terms.items():
                key = (i + k, j + l)
                out[key] = out.get(key, 0) + a * b
        return BivariatePoly(out)

    __rmul__ = __mul__

    def __eq__(self, other):
        if isinstance(other, BivariatePoly):
            return self.terms == other.terms
        return NotImplemented

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __call__(self, x, y):
        return sum((c * x**i * y**j for (i, j), c in self.terms.items()), Fraction(0) * x)

    def transpose(self):
        return BivariatePoly({(j, i): c for (i, j), c in self.terms.items()})

    def is_symmetric(self):
        return self == self.transpose()

    def symmetrized(self):
        return (self + self.transpose()) * Fraction(1, 2)

    @property
    def degree_x(self):
        return max((i for i, _ in self.terms), default=-1)

    @property
    def degree_y(self):
        return max((j for _, j in self.terms), default=-1)

    def row(self, i):
        """Coefficient of x^i as a polynomial in y."""
        d = self.degree_y
        return Polynomial1D([self.coeff(i, j) for j in range(d + 1)])

    def column(self, j):
        """Coefficient of y^j as a polynomial in x."""
        d = self.degree_x
        return Polynomial1D([self.coeff(i, j) for i in range(d + 1)])

    def coefficient_matrix(self):
        nx, ny = self.degree_x + 1, self.degree_y + 1
        return [[self.coeff(i, j) for j in range(ny)] for i in range(nx)]

    def diagonal(self):
        """p(x, x) as a univariate polynomial."""
        out = {}
        for (i, j), c in self.terms.items():
            out[i + j] = out.get(i + j, 0) + c
        n = max(out, default=-1)
        return Polynomial1D([out.get(k, 0) for k in range(n + 1)])

    def apply(self, f):
        """x -> int_0^1 Q(x,y) f(y) dy for a global polynomial kernel."""
        f = _as_poly1(f)
        out = Polynomial1D()
        for i in range(self.degree_x + 1):
            w = inner_product(self.row(i), f)
            if w:
                out = out + Polynomial1D.monomial(i, w)
        return out

    def to_float_dict(self):
        return {k: float(c) for k, c in self.terms.items()}

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda kv: (kv[0][0] + kv[0][1], kv[0][0], kv[0][1]))

    def to_json(self):
        return {"terms": [{"i": i, "j": j, "c": frac_str(c)} for (i, j), c in self.sorted_terms()]}

    @classmethod
    def from_json(cls, data):
        return cls({(int(t["i"]), int(t["j"])): as_fraction(t["c"]) for t in data["terms"]})

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = []
        for (i, j), c in self.sorted_terms():
            mono = "".join(
                s for s in ((f"x^{i}" if i > 1 else "x" if i else ""), (f"y^{j}" if j > 1 else "y" if j else "")) if s
            )
            mag = abs(c)
            body = mono if (mono and mag == 1) else f"{mag}" + (f"*{mono}" if mono else "")
            parts.append(("- " if c < 0 else "+ ") + body)
        out = " ".join(parts)
        return out[2:] if out.startswith("+ ") else "-" + out[2:]


def _as_bipoly(v):
    if isinstance(v, BivariatePoly):
        return v
    return BivariatePoly.constant(as_fraction(v))


X = BivariatePoly({(1, 0): 1})
Y = BivariatePoly({(0, 1): 1})


def _integrate_y(P, lo, hi):
    """int_lo^hi P(x,y) dy where each limit is 0, 1 or the string "x"."""

    def at(limit, i, j1, c):
        if limit == 0:
            return {}
        if limit == 1:
            return {(i, 0): c}
        return {(i + j1, 0): c}

    out = BivariatePoly()
    for (i, j), c in P.terms.items():
        c = c / (j + 1)
        out = out + BivariatePoly(at(hi, i, j + 1, c)) - BivariatePoly(at(lo, i, j + 1, c))
    return out.column(0)


class PiecewiseSymmetricKernel:
    """K(x,y) = abs_coeff*|x-y| + lower(min(x,y), max(x,y))."""

    __slots__ = ("abs_coeff", "lower")

    def __init__(self, abs_coeff, lower=None):
        self.abs_coeff = as_fraction(abs_coeff)
        self.lower = lower if lower is not None else BivariatePoly()

    @classmethod
    def nonlocal_kernel(cls):
        return cls(Fraction(-1, 2))

    @classmethod
    def from_poly(cls, Q):
        return cls(0, Q)

    def upper_branch(self):
        """K on y <= x as a polynomial in (x, y)."""
        return self.lower.transpose() + (X - Y) * self.abs_coeff

    def lower_branch(self):
        """K on x <= y as a polynomial in (x, y)."""
        return self.lower + (Y - X) * self.abs_coeff

    def __call__(self, x, y):
        return self.eval(x, y)

    def eval(self, x, y):
        if not (0 <= x <= 1 and 0 <= y <= 1):
            raise OutOfDomain(f"({x}, {y}) not in [0,1]^2")
        lo, hi = (x, y) if x <= y else (y, x)
        return self.abs_coeff * (hi - lo) + self.lower(lo, hi)

    def eval_float(self, x, y):
        """Vectorised float evaluation (numpy arrays accepted)."""
        import numpy as np

        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        lo, hi = np.minimum(x, y), np.maximum(x, y)
        out = float(self.abs_coeff) * (hi - lo)
        for (i, j), c in self.lower.terms.items():
            out = out + float(c) * lo**i * hi**j
        return out

    def is_global_polynomial(self):
        return self.abs_coeff == 0 and self.lower.is_symmetric()

    def symmetric_part(self):
        """Return Q with K = abs*|x-y| + Q(x,y), Q symmetric, if that form exists."""
        if self.lower.is_symmetric():
            return self.lower
        raise KernelError("lower branch is not symmetric")

    def canonical(self):
        """Re-express so the polynomial part is symmetric (absorbing antisymmetric (y-x) multiples)."""
        L = self.lower
        anti = (L - L.transpose()) * Fraction(1, 2)
        if anti.is_zero():
            return PiecewiseSymmetricKernel(self.abs_coeff, L)
        # on x<=y: L = sym + anti, and anti must equal c*(y - x)
        c = anti.coeff(0, 1)
        if anti != (Y - X) * c:
            raise KernelError("kernel has no |x-y| + symmetric-polynomial form")
        return PiecewiseSymmetricKernel(self.abs_coeff + c, L - (Y - X) * c)

    def __add__(self, other):
        if isinstance(other, BivariatePoly):
            other = PiecewiseSymmetricKernel(0, other)
        return PiecewiseSymmetricKernel(self.abs_coeff + other.abs_coeff, self.lower + other.lower)

    def __neg__(self):
        return PiecewiseSymmetricKernel(-self.abs_coeff, -self.lower)

    def __sub__(self, other):
        if isinstance(other, BivariatePoly):
            other = PiecewiseSymmetricKernel(0, other)
        return self + (-other)

    def __eq__(self, other):
        if isinstance(other, PiecewiseSymmetricKernel):
            return self.abs_coeff == other.abs_coeff and self.lower == other.lower
        return NotImplemented

    def __hash__(self):
        return hash((self.abs_coeff, self.lower))

    def to_json(self):
        d = self.lower.to_json()
        d["abs"] = frac_str(self.abs_coeff)
        return d

    @classmethod
    def from_json(cls, data):
        return cls(as_fraction(data.get("abs", 0)), BivariatePoly.from_json(data))

    def __repr__(self):
        return f"{self.abs_coeff}*|x-y| + [{self.lower!r}]"


def apply_to_polynomial(K, f, cap=DEGREE_CAP):
    """u(x) = int_0^1 K(x,y) f(y) dy, exact, split at y = x."""
    f = _as_poly1(f)
    if f.degree > cap:
        raise DegreeCapExceeded(f"degree {f.degree} exceeds cap {cap}")
    if isinstance(K, BivariatePoly):
        return K.apply(f)
    fy = BivariatePoly.in_y(f)
    left = _integrate_y(K.upper_branch() * fy, 0, "x")
    right = _integrate_y(K.lower_branch() * fy, "x", 1)
    return left + right


def compose_poly_kernels(A, B):
    """C(x,y) = int_0^1 A(x,s) B(s,y) ds."""
    out = {}
    for (i, k), a in A.terms.items():
        for (l, j), b in B.terms.items():
            out[(i, j)] = out.get((i, j), 0) + a * b / (k + l + 1)
    return BivariatePoly(out)


def compose_kernel_with_poly(K, Q):
    """int_0^1 K(x,s) Q(s,y) ds, treating the y-coefficients of Q as parameters."""
    if isinstance(K, BivariatePoly):
        return compose_poly_kernels(K, Q)
    out = BivariatePoly()
    for j in range(Q.degree_y + 1):
        qj = Q.column(j)
        if qj.is_zero():
            continue
        u = apply_to_polynomial(K, qj)
        out = out + BivariatePoly.from_factors(u, Polynomial1D.monomial(j))
    return out


def exact_rank(rows):
    """Rank of a rational matrix by fraction-exact Gaussian elimination."""
    m = [[as_fraction(v) for v in r] for r in rows]
    rank, ncols = 0, len(m[0]) if m else 0
    for col in range(ncols):
        piv = next((r for r in range(rank, len(m)) if m[r][col] != 0), None)
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        for r in range(len(m)):
            if r != rank and m[r][col] != 0:
                f = m[r][col] / m[rank][col]
                m[r] = [a - f * b for a, b in zip(m[r], m[rank])]
        rank += 1
    return rank
