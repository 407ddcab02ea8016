"""Closed-form prices for down-type options on the admissible moving barrier.

Each price is a vanilla-style term minus a reflected (image) term taken at
the image spot h(t)^2/S and scaled by (S/h(t))^(2C+1).  The image spot is
computed as h*(h/S) and the power factor as exp((2C+1)*(ln S - ln h)), so at
S = h(t) both terms coincide bit for bit and knockout prices vanish exactly.

Knockout puts come from the knockout call minus the knockout forward; the
knock-in styles come from in + out = vanilla.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, asdict
from typing import Optional

from .contract import BarrierContract
from .errors import DomainError, RegimeError
from .vanilla import norm_cdf, quote_from_bars


@dataclass(frozen=True)
class PriceBreakdown:
    """Price plus every intermediate the formulas produce.

    For out-styles price = vanilla_term - image_term; for in-styles
    price = image_term.  d and power fields are None on degenerate branches
    (knocked out below the barrier, knocked in, expired).
    status is one of "live", "knocked_out", "knocked_in", "expired".
    """

    price: float
    vanilla_term: float
    image_term: float
    d1: Optional[float]
    d1_prime: Optional[float]
    d2: Optional[float]
    d2_prime: Optional[float]
    C: float
    power_factor: Optional[float]
    rbar: float
    qbar: float
    sigma2bar: float
    status: str

    def to_dict(self) -> dict:
        return asdict(self)


def _bars(contract: BarrierContract, t: float):
    cs = contract.curves
    T = contract.expiry
    return (cs.integral_r(t, T), cs.integral_q(t, T), cs.integral_sigma2(t, T))


def _check_live_inputs(S: float, t: float, contract: BarrierContract):
    if S <= 0.0 or not math.isfinite(S):
        raise DomainError(f"spot must be positive, got {S}")
    if t < 0.0:
        raise DomainError(f"t={t} is negative")


def _require_regime(contract: BarrierContract):
    if not contract.in_closed_form_regime:
        raise RegimeError(
            f"strike {contract.strike} below terminal barrier {contract.barrier.h_T}; "
            "no closed form here, use the heat-kernel or PDE pricer")


def _power_factor(S: float, level: float, C: float) -> float:
    log_power = (2.0 * C + 1.0) * (math.log(S) - math.log(level))
    try:
        return math.exp(log_power)
    except OverflowError:
        raise DomainError(
            f"power factor exp({log_power:.3g}) overflows; C={C} too large "
            "for this spot/barrier ratio") from None


def _knocked_out(contract, t, rbar, qbar, s2) -> PriceBreakdown:
    return PriceBreakdown(price=0.0, vanilla_term=0.0, image_term=0.0,
                          d1=None, d1_prime=None, d2=None, d2_prime=None,
                          C=contract.barrier.C, power_factor=None,
                          rbar=rbar, qbar=qbar, sigma2bar=s2,
                          status="knocked_out")


def _expired(S: float, contract: BarrierContract, side: str, out_style: bool,
             forward: bool = False) -> PriceBreakdown:
    K = contract.strike
    lev = contract.barrier.h_T
    alive = S > lev
    if forward:
        intrinsic = S - K
    elif side == "put":
        intrinsic = max(K - S, 0.0)
    else:
        intrinsic = max(S - K, 0.0)
    settle = intrinsic if alive else 0.0
    if out_style:
        price, van, img = settle, intrinsic, intrinsic - settle
    else:
        price = 0.0 if alive else intrinsic
        van, img = intrinsic, 0.0 if alive else intrinsic
    return PriceBreakdown(price=price, vanilla_term=van, image_term=img,
                          d1=None, d1_prime=None, d2=None, d2_prime=None,
                          C=contract.barrier.C, power_factor=None,
                          rbar=0.0, qbar=0.0, sigma2bar=0.0, status="expired")


def d_values(S: float, t: float, contract: BarrierContract):
    """The four d arguments (d1, d1', d2, d2') of the knockout call.

    d2 is d1 evaluated at the image spot h(t)^2/S; primes subtract the total
    volatility sqrt(sigma2bar).  Computed through the same quote arithmetic
    the pricers use, so a breakdown carries these exact numbers.
    """
    _check_live_inputs(S, t, contract)
    if t >= contract.expiry:
        raise DomainError("d values undefined at or past expiry (sigma2bar = 0)")
    rbar, qbar, s2 = _bars(contract, t)
    lev = contract.barrier.level(t)
    K = contract.strike
    q1 = quote_from_bars(S, K, rbar, qbar, s2, "call")
    q2 = quote_from_bars(lev * (lev / S), K, rbar, qbar, s2, "call")
    return q1.d1, q1.d1_prime, q2.d1, q2.d1_prime


def _image_quotes(S, lev, contract, rbar, qbar, s2, side):
    """Vanilla quotes at S and at the image spot h*(h/S), plus the power factor."""
    K = contract.strike
    q_spot = quote_from_bars(S, K, rbar, qbar, s2, side)
    image_spot = lev * (lev / S)
    q_img = quote_from_bars(image_spot, K, rbar, qbar, s2, side)
    power = _power_factor(S, lev, contract.barrier.C)
    return q_spot, q_img, power


def down_and_out_call(S: float, t: float, contract: BarrierContract) -> PriceBreakdown:
    """Knockout call: vanilla minus power-scaled vanilla at the image spot.

    Returns 0 with a knocked_out status for S <= h(t); the value at
    S = h(t) is exactly zero because both terms coincide there.
    """
    _check_live_inputs(S, t, contract)
    _require_regime(contract)
    if t >= contract.expiry:
        return _expired(S, contract, "call", out_style=True)
    rbar, qbar, s2 = _bars(contract, t)
    lev = contract.barrier.level(t)
    if S < lev:
        return _knocked_out(contract, t, rbar, qbar, s2)
    q1, q2, power = _image_quotes(S, lev, contract, rbar, qbar, s2, "call")
    image_term = power * q2.price
    if not math.isfinite(image_term):
        raise DomainError("image term overflows; contract too far outside "
                          "the tested parameter range")
    return PriceBreakdown(
        price=q1.price - image_term,
        vanilla_term=q1.price, image_term=image_term,
        d1=q1.d1, d1_prime=q1.d1_prime, d2=q2.d1, d2_prime=q2.d1_prime,
        C=contract.barrier.C, power_factor=power,
        rbar=rbar, qbar=qbar, sigma2bar=s2,
        status="knocked_out" if S == lev else "live")


def down_and_in_call(S: float, t: float, contract: BarrierContract) -> PriceBreakdown:
    """Knock-in call: the image term itself; vanilla once S <= h(t)."""
    _check_live_inputs(S, t, contract)
    _require_regime(contract)
    if t >= contract.expiry:
        return _expired(S, contract, "call", out_style=False)
    rbar, qbar, s2 = _bars(contract, t)
    lev = contract.barrier.level(t)
    if S <= lev:
        q = quote_from_bars(S, contract.strike, rbar, qbar, s2, "call")
        return PriceBreakdown(
            price=q.price, vanilla_term=q.price, image_term=q.price,
            d1=q.d1, d1_prime=q.d1_prime, d2=None, d2_prime=None,
            C=contract.barrier.C, power_factor=None,
            rbar=rbar, qbar=qbar, sigma2bar=s2, status="knocked_in")
    q1, q2, power = _image_quotes(S, lev, contract, rbar, qbar, s2, "call")
    image_term = power * q2.price
    if not math.isfinite(image_term):
        raise DomainError("image term overflows; contract too far outside "
                          "the tested parameter range")
    return PriceBreakdown(
        price=image_term,
        vanilla_term=q1.price, image_term=image_term,
        d1=q1.d1, d1_prime=q1.d1_prime, d2=q2.d1, d2_prime=q2.d1_prime,
        C=contract.barrier.C, power_factor=power,
        rbar=rbar, qbar=qbar, sigma2bar=s2, status="live")


def _forward_leg(spot: float, K: float, h_T: float, rbar: float, qbar: float,
                 s2: float):
    """e^{-qbar} spot N(db1) - K e^{-rbar} N(db1'), moneyness measured
    against the terminal barrier level rather than the strike."""
    sd = math.sqrt(s2)
    db1 = (math.log(spot) - math.log(h_T) + rbar - qbar + 0.5 * s2) / sd
    db1p = db1 - sd
    value = (math.exp(-qbar) * spot * norm_cdf(db1)
             - K * math.exp(-rbar) * norm_cdf(db1p))
    return value, db1, db1p


def forward_barrier_value(S: float, t: float, contract: BarrierContract) -> PriceBreakdown:
    """Knockout forward: pays S_T - K at expiry unless the barrier was hit.

    The cash legs carry the strike K; the d arguments measure moneyness
    against h(T) because the payoff region boundary is the terminal barrier.
    Valid for any strike (the payoff has no kink above the barrier).
    """
    _check_live_inputs(S, t, contract)
    if t >= contract.expiry:
        return _expired(S, contract, "call", out_style=True, forward=True)
    rbar, qbar, s2 = _bars(contract, t)
    barrier = contract.barrier
    lev = barrier.level(t)
    if S < lev:
        return _knocked_out(contract, t, rbar, qbar, s2)
    K = contract.strike
    direct, db1, db1p = _forward_leg(S, K, barrier.h_T, rbar, qbar, s2)
    image_spot = lev * (lev / S)
    mirror, db2, db2p = _forward_leg(image_spot, K, barrier.h_T, rbar, qbar, s2)
    power = _power_factor(S, lev, barrier.C)
    image_term = power * mirror
    if not math.isfinite(image_term):
        raise DomainError("image term overflows; contract too far outside "
                          "the tested parameter range")
    return PriceBreakdown(
        price=direct - image_term,
        vanilla_term=direct, image_term=image_term,
        d1=db1, d1_prime=db1p, d2=db2, d2_prime=db2p,
        C=barrier.C, power_factor=power,
        rbar=rbar, qbar=qbar, sigma2bar=s2,
        status="knocked_out" if S == lev else "live")


def down_and_out_put(S: float, t: float, contract: BarrierContract) -> PriceBreakdown:
    """Knockout put: knockout call minus knockout forward (same strike).

    The subtraction happens term by term, so the direct/image split of the
    breakdown is preserved and the price vanishes exactly at the barrier.
    """
    _check_live_inputs(S, t, contract)
    _require_regime(contract)
    if t >= contract.expiry:
        return _expired(S, contract, "put", out_style=True)
    call = down_and_out_call(S, t, contract)
    fwd = forward_barrier_value(S, t, contract)
    van = call.vanilla_term - fwd.vanilla_term
    img = call.image_term - fwd.image_term
    return PriceBreakdown(
        price=van - img,
        vanilla_term=van, image_term=img,
        d1=call.d1, d1_prime=call.d1_prime, d2=call.d2, d2_prime=call.d2_prime,
        C=call.C, power_factor=call.power_factor,
        rbar=call.rbar, qbar=call.qbar, sigma2bar=call.sigma2bar,
        status=call.status)


def down_and_in_put(S: float, t: float, contract: BarrierContract) -> PriceBreakdown:
    """Knock-in put: vanilla put minus knockout put; vanilla once S <= h(t)."""
    _check_live_inputs(S, t, contract)
    _require_regime(contract)
    if t >= contract.expiry:
        return _expired(S, contract, "put", out_style=False)
    rbar, qbar, s2 = _bars(contract, t)
    lev = contract.barrier.level(t)
    vput = quote_from_bars(S, contract.strike, rbar, qbar, s2, "put")
    if S <= lev:
        return PriceBreakdown(
            price=vput.price, vanilla_term=vput.price, image_term=vput.price,
            d1=vput.d1, d1_prime=vput.d1_prime, d2=None, d2_prime=None,
            C=contract.barrier.C, power_factor=None,
            rbar=rbar, qbar=qbar, sigma2bar=s2, status="knocked_in")
    out = down_and_out_put(S, t, contract)
    price = vput.price - out.price
    return PriceBreakdown(
        price=price, vanilla_term=vput.price, image_term=price,
        d1=out.d1, d1_prime=out.d1_prime, d2=out.d2, d2_prime=out.d2_prime,
        C=out.C, power_factor=out.power_factor,
        rbar=rbar, qbar=qbar, sigma2bar=s2, status="live")


_PRICERS = {
    ("call", "down_and_out"): down_and_out_call,
    ("call", "down_and_in"): down_and_in_call,
    ("put", "down_and_out"): down_and_out_put,
    ("put", "down_and_in"): down_and_in_put,
}


def price_contract(S: float, t: float, contract: BarrierContract) -> PriceBreakdown:
    """Dispatch on the contract's side and style."""
    return _PRICERS[(contract.side, contract.style)](S, t, contract)


def constant_case_parity_gap(S: float, t: float, S_B: float, a_rate: float,
                             K: float, T: float, r: float, q: float,
                             sigma: float, printed: bool = False) -> float:
    """Residual of the constant-parameter put/call parity identity.

    Prices the exponential barrier h(t) = S_B e^{-a(T-t)} through the general
    machinery (C = -(r - q - a)/sigma^2) and evaluates the flat-parameter
    identity with direct scalar arithmetic.  Returns left minus right, which
    is zero up to roundoff.  With printed=True the left side uses N(d1')
    instead of N(d1) on the spot leg, reproducing a sign-of-typo variant
    whose gap is systematically nonzero; the CLI reports both.
    """
    from .curves import CurveSet
    from .contract import barrier_from_terminal, BarrierContract as _BC

    if sigma <= 0.0:
        raise DomainError(f"sigma must be positive, got {sigma}")
    tau = T - t
    if tau <= 0.0:
        raise DomainError(f"need t < T, got t={t}, T={T}")
    curves = CurveSet.constant(r, q, sigma)
    C = -(r - q - a_rate) / (sigma * sigma)
    barrier = barrier_from_terminal(S_B, C, curves, T)
    contract = _BC(strike=K, expiry=T, side="call", style="down_and_out",
                   barrier=barrier)
    c_do = down_and_out_call(S, t, contract).price
    p_do = down_and_out_put(S, t, contract).price

    sd = sigma * math.sqrt(tau)
    dh1 = (math.log(S / S_B) + (r - q + 0.5 * sigma * sigma) * tau) / sd
    dh1p = dh1 - sd
    dh2 = (math.log(S_B / S) + (r - q - 2.0 * a_rate + 0.5 * sigma * sigma) * tau) / sd
    dh2p = dh2 - sd
    expo = 1.0 - 2.0 * (r - q - a_rate) / (sigma * sigma)
    prefac = math.exp(expo * a_rate * tau) * (S / S_B) ** expo
    spot_leg = norm_cdf(dh1p) if printed else norm_cdf(dh1)
    left = p_do + math.exp(-q * tau) * S * spot_leg
    right = (c_do + K * math.exp(-r * tau) * norm_cdf(dh1p)
             + prefac * (math.exp(-(q + 2.0 * a_rate) * tau) * (S_B * S_B / S)
                         * norm_cdf(dh2)
                         - K * math.exp(-r * tau) * norm_cdf(dh2p)))
    return left - right
