"""Channel synthesis for the movable-antenna full-duplex ISAC scenario.

Everything random about a scenario realization lives here: the multipath user
channels sampled over every candidate position, plus the deterministic pieces
(steering vectors, residual self-interference, target/clutter response).
Channels are synthesized once per scenario; selecting actual element positions
is a cheap per-placement step (`realize`).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .geometry import CandidateGrid, Placement


def steering_vector(positions, theta: float, phi: float, wavelength: float) -> np.ndarray:
    """Unit-norm array response for a plane wave from elevation theta, azimuth phi.

    Entry n carries phase 2*pi*((x_n - x_1)*cos(theta)*sin(phi) + (y_n - y_1)*sin(theta))
    divided by the wavelength; the first position is the phase reference.
    """
    pos = np.asarray(positions, dtype=float)
    if pos.ndim == 1:
        pos = pos[None, :]
    if len(pos) == 0:
        raise ValueError("steering vector needs at least one position")
    d = pos - pos[0]
    phase = 2.0 * np.pi * (d[:, 0] * np.cos(theta) * np.sin(phi) + d[:, 1] * np.sin(theta)) / wavelength
    return np.exp(1j * phase) / np.sqrt(len(pos))


def multipath_gain(candidate, anchor, paths, wavelength: float) -> complex:
    """Sum of unit-modulus path terms for one candidate position.

    `paths` is a sequence of (theta, phi) pairs; displacement is measured from
    `anchor` (the first candidate position of the grid).
    """
    paths = np.asarray(paths, dtype=float).reshape(-1, 2)
    if len(paths) == 0:
        raise ValueError("at least one path required")
    dx = candidate[0] - anchor[0]
    dy = candidate[1] - anchor[1]
    th, ph = paths[:, 0], paths[:, 1]
    phase = 2.0 * np.pi * (dx * np.cos(th) * np.sin(ph) + dy * np.sin(th)) / wavelength
    return complex(np.exp(1j * phase).sum())


def _gain_block(grid: CandidateGrid, paths: np.ndarray, wavelength: float) -> np.ndarray:
    """Vector of multipath gains over all candidates of one grid (anchor = candidate 1)."""
    d = grid.positions - grid.positions[0]
    th, ph = paths[:, 0], paths[:, 1]
    phase = 2.0 * np.pi * (
        np.outer(d[:, 0], np.cos(th) * np.sin(ph)) + np.outer(d[:, 1], np.sin(th))
    ) / wavelength
    return np.exp(1j * phase).sum(axis=1)


@dataclass(frozen=True)
class AngleSet:
    """Target, clutter and per-user path angles (radians)."""

    target: tuple  # (theta0, phi0)
    clutter: np.ndarray        # (K, 2)
    clutter_amplitude: np.ndarray  # (K,) complex
    uplink_paths: np.ndarray   # (U, L, 2)
    downlink_paths: np.ndarray  # (D, L, 2)


@dataclass(frozen=True)
class ChannelSet:
    """All synthesized channel quantities of one scenario realization.

    ghat/hhat follow the candidate-stacked layout (per-element blocks of M or N
    columns); since a channel coefficient depends only on the candidate position,
    the blocks repeat per element. hsi_candidates holds the self-interference
    entry for every (receive candidate, transmit candidate) pair; a placement
    selects its N_r x N_t submatrix.
    """

    grid_r: CandidateGrid
    grid_t: CandidateGrid
    n_r: int
    n_t: int
    wavelength: float
    angles: AngleSet
    ghat: np.ndarray           # (U, M * N_r)
    hhat: np.ndarray           # (D, N * N_t)
    hsi_candidates: np.ndarray  # (M, N)
    alpha_u: np.ndarray        # (U,) linear power gains
    alpha_d: np.ndarray        # (D,)
    beta0: complex
    eta_si: float
    sigma2_r: float
    sigma2_d: np.ndarray       # (D,)

    @property
    def n_up(self) -> int:
        return self.ghat.shape[0]

    @property
    def n_down(self) -> int:
        return self.hhat.shape[0]

    def checksum(self) -> str:
        import hashlib

        h = hashlib.sha256()
        for arr in (self.ghat, self.hhat, self.hsi_candidates, self.alpha_u,
                    self.alpha_d, self.sigma2_d):
            h.update(np.ascontiguousarray(arr).tobytes())
        h.update(np.array([self.beta0, self.eta_si, self.sigma2_r, self.wavelength],
                          dtype=complex).tobytes())
        return h.hexdigest()


def draw_path_angles(rng: np.random.Generator, n_users: int, n_paths: int) -> np.ndarray:
    """i.i.d. uniform elevation/azimuth on [-pi/2, pi/2] per path per user."""
    return rng.uniform(-np.pi / 2, np.pi / 2, size=(n_users, n_paths, 2))


def synthesize(grid_r: CandidateGrid, grid_t: CandidateGrid, n_r: int, n_t: int,
               angles: AngleSet, wavelength: float, alpha_u, alpha_d, beta0: complex,
               eta_si: float, sigma2_r: float, sigma2_d) -> ChannelSet:
    """Build the full candidate-domain ChannelSet from already-drawn angles."""
    U = len(angles.uplink_paths)
    D = len(angles.downlink_paths)
    g_block = np.array([_gain_block(grid_r, angles.uplink_paths[u], wavelength)
                        for u in range(U)]) if U else np.zeros((0, grid_r.count), complex)
    h_block = np.array([_gain_block(grid_t, angles.downlink_paths[d], wavelength)
                        for d in range(D)])
    ghat = np.tile(g_block, (1, n_r)) if U else np.zeros((0, grid_r.count * n_r), complex)
    hhat = np.tile(h_block, (1, n_t))
    hsi = self_interference(eta_si, grid_r.positions, grid_t.positions, wavelength)
    return ChannelSet(
        grid_r=grid_r, grid_t=grid_t, n_r=n_r, n_t=n_t, wavelength=wavelength,
        angles=angles, ghat=ghat, hhat=hhat, hsi_candidates=hsi,
        alpha_u=np.asarray(alpha_u, float), alpha_d=np.asarray(alpha_d, float),
        beta0=complex(beta0), eta_si=float(eta_si), sigma2_r=float(sigma2_r),
        sigma2_d=np.asarray(sigma2_d, float),
    )


def assemble_uplink(ghat: np.ndarray, placement: Placement) -> np.ndarray:
    """G = Ghat @ B_r: column n_r is element n_r's block evaluated at its candidate."""
    U = ghat.shape[0]
    m, n = placement.n_candidates, placement.n_elements
    if ghat.shape[1] != m * n:
        raise ValueError(f"ghat has {ghat.shape[1]} columns, expected {m * n}")
    cols = [ghat[:, e * m + placement.indices[e]] for e in range(n)]
    return np.stack(cols, axis=1) if n else np.zeros((U, 0), complex)


def assemble_downlink(hhat: np.ndarray, placement: Placement) -> np.ndarray:
    """H = Hhat @ B_t, mirror of assemble_uplink."""
    return assemble_uplink(hhat, placement)


def self_interference(eta_si: float, positions_r, positions_t, wavelength: float) -> np.ndarray:
    """Residual transmit-to-receive leakage: entries sqrt(eta) * exp(-j*2*pi*d/lambda)."""
    pr = np.atleast_2d(np.asarray(positions_r, float))
    pt = np.atleast_2d(np.asarray(positions_t, float))
    d = np.linalg.norm(pr[:, None, :] - pt[None, :, :], axis=2)
    if np.any(d <= 0):
        raise ValueError("transmit and receive arrays overlap: zero distance entry")
    return np.sqrt(eta_si) * np.exp(-1j * 2.0 * np.pi * d / wavelength)


@dataclass(frozen=True)
class SensingMatrices:
    """Target response and composite interference channels for one placement."""

    a_target: np.ndarray  # (N_r, N_t) rank-1 target response
    q: np.ndarray         # clutter + self-interference (target excluded)
    c: np.ndarray         # q + beta0 * a_target


def sensing_matrices(channels: ChannelSet, placement_r: Placement,
                     placement_t: Placement) -> SensingMatrices:
    pos_r = placement_r.positions(channels.grid_r)
    pos_t = placement_t.positions(channels.grid_t)
    lam = channels.wavelength
    th0, ph0 = channels.angles.target
    a_tgt = np.outer(steering_vector(pos_r, th0, ph0, lam),
                     steering_vector(pos_t, th0, ph0, lam).conj())
    hsi = channels.hsi_candidates[np.ix_(list(placement_r.indices), list(placement_t.indices))]
    q = hsi.astype(complex).copy()
    for (th, ph), bk in zip(channels.angles.clutter, channels.angles.clutter_amplitude):
        q += bk * np.outer(steering_vector(pos_r, th, ph, lam),
                           steering_vector(pos_t, th, ph, lam).conj())
    return SensingMatrices(a_target=a_tgt, q=q, c=q + channels.beta0 * a_tgt)


@dataclass(frozen=True)
class PlacedChannel:
    """Channel quantities realized at one (receive, transmit) placement pair.

    g_eff columns are sqrt(alpha_u) * (ghat_u B_r)^H, h_eff columns are
    sqrt(alpha_d) * (hhat_d B_t)^H; all downstream SINR formulas consume these.
    """

    channels: ChannelSet
    placement_r: Placement
    placement_t: Placement
    g: np.ndarray       # (U, N_r) raw uplink channel rows
    h: np.ndarray       # (D, N_t)
    g_eff: np.ndarray   # (N_r, U)
    h_eff: np.ndarray   # (N_t, D)
    a_r0: np.ndarray    # (N_r,)
    a_t0: np.ndarray    # (N_t,)
    sensing: SensingMatrices

    @property
    def n_r(self) -> int:
        return self.g_eff.shape[0]

    @property
    def n_t(self) -> int:
        return self.h_eff.shape[0]

    @property
    def n_up(self) -> int:
        return self.g_eff.shape[1]

    @property
    def n_down(self) -> int:
        return self.h_eff.shape[1]

    @property
    def sigma2_r(self) -> float:
        return self.channels.sigma2_r

    @property
    def sigma2_d(self) -> np.ndarray:
        return self.channels.sigma2_d

    @property
    def beta0(self) -> complex:
        return self.channels.beta0


def realize(channels: ChannelSet, placement_r: Placement, placement_t: Placement) -> PlacedChannel:
    """Select element positions and bundle every placement-dependent quantity."""
    g = assemble_uplink(channels.ghat, placement_r)
    h = assemble_downlink(channels.hhat, placement_t)
    g_eff = (np.sqrt(channels.alpha_u)[:, None] * g).conj().T
    h_eff = (np.sqrt(channels.alpha_d)[:, None] * h).conj().T
    pos_r = placement_r.positions(channels.grid_r)
    pos_t = placement_t.positions(channels.grid_t)
    th0, ph0 = channels.angles.target
    return PlacedChannel(
        channels=channels, placement_r=placement_r, placement_t=placement_t,
        g=g, h=h, g_eff=g_eff, h_eff=h_eff,
        a_r0=steering_vector(pos_r, th0, ph0, channels.wavelength),
        a_t0=steering_vector(pos_t, th0, ph0, channels.wavelength),
        sensing=sensing_matrices(channels, placement_r, placement_t),
    )
