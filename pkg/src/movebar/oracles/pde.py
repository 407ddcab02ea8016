"""Lattice pricer: Crank-Nicolson on the barrier-fixed log coordinate.

The knockout problem is solved in x = ln(S/h(t)), where the barrier sits
still at x = 0 and the convection picks up the barrier's growth rate.  The
coefficients are frozen per time step at the step midpoint, which is exact
for piecewise-constant curves once the step grid is aligned to the curve
breakpoints.  The first steps out of the (kinked) payoff are fully implicit
so the scheme keeps clean second-order behaviour.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.linalg import solve_banded

from ..contract import BarrierContract
from ..errors import AccuracyError, DomainError

# width of the truncated domain in units of total volatility
_DOMAIN_SDS = 8.0
# number of maturity-adjacent steps replaced by implicit half-steps
_SMOOTHING_STEPS = 2


@dataclass(frozen=True)
class PdeGrid:
    """Uniform space grid on [0, x_max], n_time steps, theta weighting."""

    x_max: float
    n_space: int
    n_time: int
    theta: float = 0.5

    def __post_init__(self):
        if self.n_space < 4 or self.n_time < 4:
            raise DomainError("need n_space >= 4 and n_time >= 4")
        if not (self.x_max > 0.0 and math.isfinite(self.x_max)):
            raise DomainError(f"x_max must be positive, got {self.x_max}")
        if not 0.0 <= self.theta <= 1.0:
            raise DomainError(f"theta must be in [0, 1], got {self.theta}")

    @classmethod
    def for_contract(cls, S: float, t: float, contract: BarrierContract,
                     n_space: int = 400, n_time: int = 400) -> "PdeGrid":
        """Domain wide enough for spot, strike kink and 8 sd of diffusion.

        The payoff kink ln(K/h_T) is snapped onto a grid node (the node
        count is kept, x_max moves slightly) so the terminal data is exactly
        representable.
        """
        barrier = contract.barrier
        lev = barrier.level(t)
        if S < lev:
            raise DomainError(f"S={S} below barrier level {lev}")
        x_spot = math.log(S) - math.log(lev)
        sd = math.sqrt(contract.curves.integral_sigma2(t, contract.expiry))
        kink = math.log(contract.strike) - math.log(barrier.h_T)
        x_max = max(x_spot, kink, 0.0) + _DOMAIN_SDS * sd
        if kink > 0.0:
            j = max(1, round(kink * n_space / x_max))
            x_max = kink * n_space / j
        return cls(x_max=x_max, n_space=n_space, n_time=n_time)


def _time_grid(t: float, T: float, n_time: int, contract: BarrierContract):
    """Uniform step grid refined to hit every curve breakpoint exactly."""
    base = [t + (T - t) * i / n_time for i in range(n_time + 1)]
    cs = contract.curves
    extra = {b for curve in (cs.r, cs.q, cs.sigma) for b in curve.breakpoints
             if t < b < T}
    grid = sorted(set(base) | extra)
    # drop near-duplicates (a breakpoint landing on a uniform node)
    out = [grid[0]]
    tiny = 1e-12 * max(T - t, 1.0)
    for g in grid[1:]:
        if g - out[-1] > tiny:
            out.append(g)
    out[-1] = T
    return out


def pde_price(S: float, t: float, contract: BarrierContract,
              grid: PdeGrid | None = None, tol: float | None = None) -> float:
    """Crank-Nicolson price of the knockout problem for the contract's side.

    Knock-in styles have no absorbing-boundary PDE of their own; price them
    as vanilla minus knockout.  If tol is given the solve is repeated on a
    half-resolution grid and a Richardson error estimate above tol raises
    AccuracyError.
    """
    if contract.style != "down_and_out":
        raise DomainError("lattice oracle prices down_and_out styles; "
                          "knock-in follows from in + out = vanilla")
    if t >= contract.expiry:
        raise DomainError("lattice pricer requires t < T")
    if grid is None:
        grid = PdeGrid.for_contract(S, t, contract)
    value = _solve(S, t, contract, grid)
    if tol is not None:
        coarse = PdeGrid(x_max=grid.x_max, n_space=max(4, grid.n_space // 2),
                         n_time=max(4, grid.n_time // 2), theta=grid.theta)
        estimate = abs(value - _solve(S, t, contract, coarse)) / 3.0
        if estimate > tol:
            raise AccuracyError(
                f"grid too coarse: Richardson estimate {estimate:.3e} "
                f"exceeds tolerance {tol:.3e}")
    return value


def _solve(S: float, t: float, contract: BarrierContract, grid: PdeGrid) -> float:
    barrier = contract.barrier
    cs = contract.curves
    T = contract.expiry
    K = contract.strike
    lev_t = barrier.level(t)
    if S < lev_t:
        raise DomainError(f"S={S} below barrier level {lev_t}")
    x_eval = math.log(S) - math.log(lev_t)
    if x_eval > grid.x_max:
        raise DomainError(f"x={x_eval:.4f} outside grid [0, {grid.x_max:.4f}]")

    n = grid.n_space
    dx = grid.x_max / n
    x = np.linspace(0.0, grid.x_max, n + 1)
    is_call = contract.side == "call"

    spots_T = barrier.h_T * np.exp(x)
    v = np.maximum(spots_T - K, 0.0) if is_call else np.maximum(K - spots_T, 0.0)
    v[0] = 0.0

    def boundary(time: float) -> float:
        if not is_call:
            return 0.0
        rbar = cs.integral_r(time, T)
        qbar = cs.integral_q(time, T)
        return (math.exp(-qbar) * math.exp(grid.x_max) * barrier.level(time)
                - K * math.exp(-rbar))

    times = _time_grid(t, T, grid.n_time, contract)

    def substeps():
        """(t_lo, t_hi, theta) triples, maturity first."""
        smoothed = 0
        for t_hi, t_lo in zip(reversed(times), reversed(times[:-1])):
            if smoothed < _SMOOTHING_STEPS:
                mid = 0.5 * (t_lo + t_hi)
                yield mid, t_hi, 1.0
                yield t_lo, mid, 1.0
                smoothed += 1
            else:
                yield t_lo, t_hi, grid.theta

    for t_lo, t_hi, theta in substeps():
        dt = t_hi - t_lo
        mid = 0.5 * (t_lo + t_hi)
        sig = cs.sigma.value_at(mid)
        sig2 = sig * sig
        conv = (cs.r.value_at(mid) - cs.q.value_at(mid) - 0.5 * sig2
                - barrier.growth_rate(mid))
        react = -cs.r.value_at(mid)
        alpha = 0.5 * sig2 / (dx * dx) - 0.5 * conv / dx
        beta = -sig2 / (dx * dx) + react
        gamma = 0.5 * sig2 / (dx * dx) + 0.5 * conv / dx

        rhs = v[1:-1] + (1.0 - theta) * dt * (
            alpha * v[:-2] + beta * v[1:-1] + gamma * v[2:])
        bc_lo = boundary(t_lo)
        rhs[-1] += theta * dt * gamma * bc_lo

        ab = np.empty((3, n - 1))
        ab[0, :] = -theta * dt * gamma
        ab[1, :] = 1.0 - theta * dt * beta
        ab[2, :] = -theta * dt * alpha
        interior = solve_banded((1, 1), ab, rhs)

        v = np.empty(n + 1)
        v[0] = 0.0
        v[1:-1] = interior
        v[-1] = bc_lo

    return float(CubicSpline(x, v)(x_eval))
