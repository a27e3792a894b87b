"""SINR figures of merit, closed-form receive filters and beampatterns.

All computations take covariance-form solutions: downlink beams enter as PSD
matrices W_d (index 0 is the dedicated sensing covariance W0), uplink users as
scalar powers. Physical units (watts) throughout.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .channel import PlacedChannel, steering_vector


@dataclass
class BeamformingSolution:
    """Downlink covariances (w_cov[0] = sensing covariance), uplink powers, filters.

    w_cov has shape (D+1, N_t, N_t); p has shape (U,). Receive filters are
    filled in by optimal_receivers once the transmit side is fixed. beams holds
    the rank-1 vectors extracted from each covariance when extraction applies.
    """

    w_cov: np.ndarray
    p: np.ndarray
    receivers: list = field(default_factory=list)   # U filters, each (N_r,)
    sensing_filter: np.ndarray | None = None
    beams: list = field(default_factory=list)       # extracted rank-1 vectors

    @property
    def w_total(self) -> np.ndarray:
        return self.w_cov.sum(axis=0)

    @property
    def objective(self) -> float:
        return total_power(self)

    def copy(self) -> "BeamformingSolution":
        return BeamformingSolution(
            w_cov=self.w_cov.copy(), p=self.p.copy(),
            receivers=[r.copy() for r in self.receivers],
            sensing_filter=None if self.sensing_filter is None else self.sensing_filter.copy(),
            beams=[b.copy() for b in self.beams],
        )


def total_power(solution: BeamformingSolution) -> float:
    """Tr(W_total) + sum of uplink powers, watts."""
    return float(np.real(np.trace(solution.w_total)) + solution.p.sum())


@dataclass(frozen=True)
class CovariancePair:
    theta: np.ndarray   # (N_r, N_r)
    omegas: np.ndarray  # (U, N_r, N_r)


def _check_psd(w_total: np.ndarray, tol: float = 1e-8):
    ev = np.linalg.eigvalsh((w_total + w_total.conj().T) / 2)
    if ev.min() < -tol * max(ev.max(), 1.0):
        raise ValueError("aggregate transmit covariance is not PSD")


def covariances(placed: PlacedChannel, solution: BeamformingSolution,
                check: bool = False) -> CovariancePair:
    """Interference-plus-noise covariances at the base-station receiver.

    theta sums uplink signals, the non-target echo of the transmit covariance
    and noise; omega_u swaps in the full echo (target included) and removes
    user u's own signal.
    """
    wt = solution.w_total
    if check:
        _check_psd(wt)
    U = placed.n_up
    n_r = placed.n_r
    q, c = placed.sensing.q, placed.sensing.c
    rank1 = np.einsum("iu,ju->uij", placed.g_eff, placed.g_eff.conj())
    up = solution.p[:, None, None] * rank1 if U else np.zeros((0, n_r, n_r))
    up_sum = up.sum(axis=0) if U else np.zeros((n_r, n_r), complex)
    noise = placed.sigma2_r * np.eye(n_r)
    theta = up_sum + q @ wt @ q.conj().T + noise
    cwc = c @ wt @ c.conj().T
    omegas = np.empty((U, n_r, n_r), complex)
    for u in range(U):
        omegas[u] = (up_sum - up[u]) + cwc + noise
    return CovariancePair(theta=theta, omegas=omegas)


def sensing_sinr(placed: PlacedChannel, solution: BeamformingSolution,
                 cov: CovariancePair | None = None) -> float:
    """Radar SINR of the sensing filter against the target echo."""
    v = solution.sensing_filter
    if v is None or not np.any(v):
        raise ValueError("sensing filter is unset or zero")
    if cov is None:
        cov = covariances(placed, solution)
    a0 = placed.sensing.a_target
    num = abs(placed.beta0) ** 2 * np.real(
        v.conj() @ a0 @ solution.w_total @ a0.conj().T @ v)
    den = np.real(v.conj() @ cov.theta @ v)
    return float(num / den)


def uplink_sinr(placed: PlacedChannel, solution: BeamformingSolution, u: int,
                cov: CovariancePair | None = None) -> float:
    r = solution.receivers[u]
    if not np.any(r):
        raise ValueError("receive filter is zero")
    if cov is None:
        cov = covariances(placed, solution)
    gu = placed.g_eff[:, u]
    num = solution.p[u] * abs(r.conj() @ gu) ** 2
    den = np.real(r.conj() @ cov.omegas[u] @ r)
    return float(num / den)


def downlink_sinr(placed: PlacedChannel, solution: BeamformingSolution, d: int) -> float:
    hd = placed.h_eff[:, d]
    sig = np.real(hd.conj() @ solution.w_cov[1 + d] @ hd)
    inter = np.real(hd.conj() @ (solution.w_total - solution.w_cov[1 + d]) @ hd)
    return float(sig / (inter + placed.sigma2_d[d]))


def all_sinrs(placed: PlacedChannel, solution: BeamformingSolution):
    """(sensing, uplink array, downlink array) with optimal receivers implied."""
    cov = covariances(placed, solution)
    r_list, v = optimal_receivers(placed, solution, cov)
    sol = BeamformingSolution(w_cov=solution.w_cov, p=solution.p,
                              receivers=r_list, sensing_filter=v)
    s_r = sensing_sinr(placed, sol, cov)
    s_u = np.array([uplink_sinr(placed, sol, u, cov) for u in range(placed.n_up)])
    s_d = np.array([downlink_sinr(placed, sol, d) for d in range(placed.n_down)])
    return s_r, s_u, s_d


def optimal_receivers(placed: PlacedChannel, solution: BeamformingSolution,
                      cov: CovariancePair | None = None):
    """Closed-form SINR-maximizing filters: r_u = Omega_u^{-1} g_eff_u, v = Theta^{-1} a_r0."""
    if cov is None:
        cov = covariances(placed, solution)
    r_list = [np.linalg.solve(cov.omegas[u], placed.g_eff[:, u])
              for u in range(placed.n_up)]
    v = np.linalg.solve(cov.theta, placed.a_r0)
    return r_list, v


def angle_grid(step_deg: float = 1.0):
    """Elevation/azimuth grids over [-90, 90] degrees, in radians."""
    deg = np.arange(-90.0, 90.0 + step_deg / 2, step_deg)
    return np.deg2rad(deg), np.deg2rad(deg)


def _steering_field(positions, thetas, phis, wavelength):
    """Array responses over the full angle grid: (n_theta, n_phi, n_elements)."""
    pos = np.asarray(positions, float)
    d = pos - pos[0]
    ct_sp = np.outer(np.cos(thetas), np.sin(phis))     # (T, P)
    st = np.sin(thetas)[:, None] * np.ones_like(phis)[None, :]
    phase = 2.0 * np.pi * (ct_sp[..., None] * d[:, 0] + st[..., None] * d[:, 1]) / wavelength
    return np.exp(1j * phase) / np.sqrt(len(pos))


def transmit_beampattern(w_total: np.ndarray, positions_t, thetas, phis,
                         wavelength: float) -> np.ndarray:
    """Expected transmit pattern a_t(theta,phi)^H W a_t(theta,phi) over the grid."""
    a = _steering_field(positions_t, thetas, phis, wavelength)
    return np.real(np.einsum("tpi,ij,tpj->tp", a.conj(), w_total, a))


def receive_beampattern(filt: np.ndarray, positions_r, thetas, phis,
                        wavelength: float) -> np.ndarray:
    """|f^H a_r(theta,phi)|^2 with f normalized to unit norm."""
    f = np.asarray(filt, complex)
    nrm = np.linalg.norm(f)
    if nrm == 0:
        raise ValueError("receive filter is zero")
    f = f / nrm
    a = _steering_field(positions_r, thetas, phis, wavelength)
    return np.abs(np.einsum("i,tpi->tp", f.conj(), a)) ** 2
