"""Compilation of the inversion objective into quadratic and Ising forms.

The regularized least-squares objective

    E(m) = sum_theta ||d(theta) - G(theta) m||^2 + lambda ||m - m_lf||^2

is first collected into E(m) = m^T Q m + b.m + constant with
Q = sum_theta G^T G + lambda I, then expanded through a SpinEncoding into an
Ising Hamiltonian H(sigma) = sum_{p<q} J_pq sigma_p sigma_q + h.sigma whose
tracked constant makes H(sigma) + constant equal E at the decoded weights,
up to float rounding. Nothing is dropped: sigma^2 = 1 diagonal terms and all
center cross-terms are folded into the constant.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .encoding import SpinAssignment, SpinEncoding
from .errors import FileFormatError, ValidationError
from .forward import ForwardOperator, SeismicGather


def _check_consistent(data: SeismicGather, op: ForwardOperator) -> None:
    if data.angles != op.angles.angles:
        raise ValidationError("gather angles do not match operator angles")
    if data.axis != op.axis:
        raise ValidationError("gather axis does not match operator axis")


def evaluate_objective(data: SeismicGather, op: ForwardOperator, m, m_lf,
                       lam: float) -> float:
    """Data misfit over all (time, angle) plus the weighted background penalty."""
    _check_consistent(data, op)
    if lam < 0 or not np.isfinite(lam):
        raise ValidationError("lambda must be finite and non-negative")
    m = np.asarray(m, dtype=np.float64)
    m_lf = np.asarray(m_lf, dtype=np.float64)
    if m.shape != (op.n_parameters,) or m_lf.shape != (op.n_parameters,):
        raise ValidationError(f"model vectors must have length {op.n_parameters}")
    misfit = 0.0
    for g, trace in zip(op.composed, data.traces):
        residual = trace - g @ m
        misfit += float(residual @ residual)
    deviation = m - m_lf
    return misfit + lam * float(deviation @ deviation)


@dataclass(frozen=True, eq=False)
class QuadraticObjective:
    """E(m) = m^T Q m + b.m + constant with Q symmetric."""

    Q: np.ndarray
    b: np.ndarray
    constant: float

    def __post_init__(self):
        q = np.asarray(self.Q, dtype=np.float64)
        b = np.asarray(self.b, dtype=np.float64)
        if q.ndim != 2 or q.shape[0] != q.shape[1]:
            raise ValidationError("Q must be square")
        if b.shape != (q.shape[0],):
            raise ValidationError("b length must match Q")
        q = q.copy()
        b = b.copy()
        q.flags.writeable = False
        b.flags.writeable = False
        object.__setattr__(self, "Q", q)
        object.__setattr__(self, "b", b)

    @property
    def n_weights(self) -> int:
        return self.Q.shape[0]

    def evaluate(self, m) -> float:
        m = np.asarray(m, dtype=np.float64)
        return float(m @ self.Q @ m + self.b @ m + self.constant)


def assemble_quadratic(data: SeismicGather, op: ForwardOperator, m_lf,
                       lam: float) -> QuadraticObjective:
    """Collect the objective into explicit (Q, b, constant).

    Q = sum G^T G + lambda I; b = -2 sum d^T G - 2 lambda m_lf;
    constant = sum d^T d + lambda m_lf^T m_lf. Q is symmetrized after
    accumulation to wash out rounding asymmetry.
    """
    _check_consistent(data, op)
    if lam < 0 or not np.isfinite(lam):
        raise ValidationError("lambda must be finite and non-negative")
    m_lf = np.asarray(m_lf, dtype=np.float64)
    n = op.n_parameters
    if m_lf.shape != (n,):
        raise ValidationError(f"m_lf must have length {n}")
    q = lam * np.eye(n)
    b = -2.0 * lam * m_lf
    constant = lam * float(m_lf @ m_lf)
    for g, trace in zip(op.composed, data.traces):
        q += g.T @ g
        b -= 2.0 * trace @ g
        constant += float(trace @ trace)
    q = 0.5 * (q + q.T)
    return QuadraticObjective(Q=q, b=b, constant=constant)


@dataclass(frozen=True, eq=False)
class IsingProblem:
    """H(sigma) = sum_{p<q} J_pq sigma_p sigma_q + h.sigma, plus a constant.

    J is stored dense and symmetric with zero diagonal; J[p, q] is the full
    coupling of the unordered pair, so H = 0.5 sigma^T J sigma + h.sigma.
    `constant` absorbs everything sigma-independent; energy() reports
    H + constant.
    """

    n_spins_total: int
    J: np.ndarray
    h: np.ndarray
    constant: float

    def __post_init__(self):
        n = self.n_spins_total
        j = np.asarray(self.J, dtype=np.float64)
        h = np.asarray(self.h, dtype=np.float64)
        if j.shape != (n, n):
            raise ValidationError("J must be (n_spins_total, n_spins_total)")
        if h.shape != (n,):
            raise ValidationError("h must have length n_spins_total")
        if not np.allclose(j, j.T, rtol=0.0, atol=0.0):
            raise ValidationError("J must be exactly symmetric")
        if np.any(np.diag(j) != 0.0):
            raise ValidationError("J must have a zero diagonal")
        j = j.copy()
        h = h.copy()
        j.flags.writeable = False
        h.flags.writeable = False
        object.__setattr__(self, "J", j)
        object.__setattr__(self, "h", h)

    def energy(self, assignment: SpinAssignment) -> float:
        """Total energy H(sigma) + constant."""
        s = assignment.spins.astype(np.float64)
        if s.size != self.n_spins_total:
            raise ValidationError("assignment size does not match problem")
        return float(0.5 * s @ self.J @ s + self.h @ s + self.constant)

    def coupling_items(self):
        """Yield ((p, q), J_pq) for p < q with nonzero coupling, in index order."""
        n = self.n_spins_total
        for p in range(n):
            row = self.J[p]
            for q in range(p + 1, n):
                if row[q] != 0.0:
                    yield (p, q), float(row[q])


def compile_to_ising(quad: QuadraticObjective, enc: SpinEncoding) -> IsingProblem:
    """Expand the quadratic objective through the spin encoding.

    With per-spin coefficients a_(i,alpha) = s_i 2^-alpha the substitution
    w = c + M sigma gives couplings J = M^T Q M folded over both orderings,
    biases h = M^T (2 Q c + b), and a constant that keeps
    H(sigma) + constant == E(decode(sigma)).
    """
    if quad.n_weights != enc.n_weights:
        raise ValidationError("objective dimension does not match encoding")
    place = enc.place_values()
    coeff = (enc.scales[:, None] * place[None, :]).reshape(-1)
    widx = np.repeat(np.arange(enc.n_weights), enc.n_spins)
    k = coeff[:, None] * coeff[None, :] * quad.Q[np.ix_(widx, widx)]
    j = k + k.T  # both orderings of each unordered pair
    diag = np.diag(j).copy()
    np.fill_diagonal(j, 0.0)
    qc = quad.Q @ enc.centers
    h = coeff * (2.0 * qc + quad.b)[widx]
    constant = (
        quad.constant
        + float(enc.centers @ qc)
        + float(quad.b @ enc.centers)
        + 0.5 * float(np.sum(diag))  # sigma^2 = 1 terms: sum_i Q_ii s_i^2 sum_a 4^-a
    )
    return IsingProblem(n_spins_total=enc.total_spins, J=j, h=h, constant=constant)


def _format_float(x: float) -> str:
    return format(float(x), ".17g")


def export_qubo(ising: IsingProblem, path) -> None:
    """Write the problem as a 0/1-variable QUBO coordinate list.

    Spins map to bits via sigma = 2x - 1. The file holds `i j value` rows
    (i <= j, ascending), with the variable count and the additive constant in
    comment headers so the total energy is recoverable: for any bitstring x,
    sum_{i<=j} U_ij x_i x_j + constant equals H(sigma(x)) + ising.constant.
    """
    n = ising.n_spins_total
    row_coupling_sums = ising.J.sum(axis=1)  # diag is zero
    diag = 2.0 * ising.h - 2.0 * row_coupling_sums
    upper = 4.0 * np.triu(ising.J, k=1)
    constant = ising.constant - float(np.sum(ising.h)) + 0.5 * float(np.sum(ising.J))
    lines = [
        "# QUBO coordinate list: minimize sum_{i<=j} U[i,j] x_i x_j + constant over x in {0,1}",
        f"# n_vars={n}",
        f"# constant={_format_float(constant)}",
    ]
    for i in range(n):
        if diag[i] != 0.0:
            lines.append(f"{i} {i} {_format_float(diag[i])}")
        for jcol in range(i + 1, n):
            if upper[i, jcol] != 0.0:
                lines.append(f"{i} {jcol} {_format_float(upper[i, jcol])}")
    with open(path, "w", encoding="utf-8") as f:
        f.write("\n".join(lines) + "\n")


def import_qubo(path) -> IsingProblem:
    """Read a coordinate-list QUBO file back into spin form.

    Inverse of export_qubo: the reconstructed problem has the same total
    energy as the exported one for every assignment.
    """
    n = None
    constant = None
    entries = []
    with open(path, "r", encoding="utf-8") as f:
        for lineno, raw in enumerate(f, start=1):
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                body = line.lstrip("#").strip()
                if body.startswith("n_vars="):
                    n = int(body.split("=", 1)[1])
                elif body.startswith("constant="):
                    constant = float(body.split("=", 1)[1])
                continue
            parts = line.split()
            if len(parts) != 3:
                raise FileFormatError(f"{path}:{lineno}: expected 'i j value'")
            try:
                i, jcol, value = int(parts[0]), int(parts[1]), float(parts[2])
            except ValueError as exc:
                raise FileFormatError(f"{path}:{lineno}: {exc}") from exc
            if i > jcol:
                raise FileFormatError(f"{path}:{lineno}: entries must be upper-triangular")
            entries.append((lineno, i, jcol, value))
    if n is None:
        raise FileFormatError(f"{path}: missing '# n_vars=' header")
    if constant is None:
        raise FileFormatError(f"{path}: missing '# constant=' header")
    u = np.zeros((n, n))
    for lineno, i, jcol, value in entries:
        if not (0 <= i < n and 0 <= jcol < n):
            raise FileFormatError(f"{path}:{lineno}: index out of range")
        u[i, jcol] = value
    j = (u + u.T) / 4.0
    np.fill_diagonal(j, 0.0)
    h = np.diag(u) / 2.0 + j.sum(axis=1)
    ising_constant = constant + float(np.sum(h)) - 0.5 * float(np.sum(j))
    return IsingProblem(n_spins_total=n, J=j, h=h, constant=ising_constant)


def dump_quadratic_json(quad: QuadraticObjective, path) -> None:
    """Debug dump of (Q, b, constant) at full decimal precision."""
    import json

    payload = {
        "n_weights": quad.n_weights,
        "Q": [[float(v) for v in row] for row in quad.Q],
        "b": [float(v) for v in quad.b],
        "constant": float(quad.constant),
    }
    with open(path, "w", encoding="utf-8") as f:
        json.dump(payload, f, indent=2)
        f.write("\n")
