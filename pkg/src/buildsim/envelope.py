"""5R1C zone thermal network (EN ISO 13790 topology).

Nodes: air (``t_air``), internal surface (``t_sur``) and mass (``t_mas``),
coupled to the exterior (``t_ext``) and the supply air (``t_sup``)::

    t_sup --h_ve-- t_air --h_the-- t_sur --h_mas-- t_mas --h_tra-- t_ext
                                     |                |
                                  h_win             c_m
                                     |
                                   t_ext

Air and surface nodes carry no capacity and are eliminated algebraically;
the mass node is integrated with the Crank-Nicolson rule.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

H_MS = 9.1  # W/(m2 K), surface-to-mass coefficient
H_AS = 3.45  # W/(m2 K), air-to-surface coefficient
RHO_CP_AIR = 1200.0  # J/(m3 K)


@dataclass(frozen=True)
class Window:
    area: float  # m2
    azimuth: float = 0.0  # deg from south, west positive
    tilt: float = 90.0  # deg from horizontal
    g_value: float = 0.6

    def __post_init__(self):
        if not self.area > 0:
            raise ValueError("window area must be positive")
        if not 0.0 < self.g_value <= 1.0:
            raise ValueError("g-value must lie in (0, 1]")


@dataclass(frozen=True)
class BuildingFabric:
    a_f: float  # conditioned floor area, m2
    u_op: float  # W/(m2 K)
    a_op: float  # m2
    u_win: float  # W/(m2 K)
    windows: tuple[Window, ...]
    volume: float  # m3
    f_ms: float = 2.5
    rat_sur: float = 4.5
    c_m_spec: float = 165e3  # J/(m2 K)
    ach: float = 0.5  # 1/h
    footprint: float = 168.9  # m2
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "windows", tuple(self.windows))
        for key in ("a_f", "u_op", "a_op", "u_win", "volume", "f_ms", "rat_sur", "c_m_spec", "ach", "footprint"):
            if not getattr(self, key) > 0:
                raise ValueError(f"fabric parameter {key} must be positive")
        if not self.windows:
            raise ValueError("fabric needs at least one window")

    @property
    def a_win(self) -> float:
        return sum(w.area for w in self.windows)


@dataclass(frozen=True)
class FiveR1CNetwork:
    h_win: float
    h_op: float
    h_tra: float
    h_mas: float
    h_the: float
    h_ve: float
    c_m: float
    a_m: float
    a_tot: float

    def __post_init__(self):
        for key in ("h_win", "h_op", "h_tra", "h_mas", "h_the", "h_ve", "c_m", "a_m", "a_tot"):
            if not getattr(self, key) > 0:
                raise ValueError(f"network parameter {key} must be positive")


@dataclass(frozen=True)
class ZoneState:
    t_mas: float
    t_air: float = field(default=float("nan"))
    t_sur: float = field(default=float("nan"))

    def __post_init__(self):
        if not 200.0 < self.t_mas < 350.0:
            raise ValueError(f"mass temperature {self.t_mas} K outside the valid range")


def build_network(fabric: BuildingFabric) -> FiveR1CNetwork:
    h_mas = H_MS * fabric.f_ms * fabric.a_f
    h_op = fabric.u_op * fabric.a_op
    if h_op >= h_mas:
        raise ValueError(
            f"opaque conductance {h_op:.1f} W/K must be below surface-mass conductance {h_mas:.1f} W/K"
        )
    return FiveR1CNetwork(
        h_win=fabric.u_win * fabric.a_win,
        h_op=h_op,
        h_tra=1.0 / (1.0 / h_op - 1.0 / h_mas),
        h_mas=h_mas,
        h_the=H_AS * fabric.rat_sur * fabric.a_f,
        h_ve=RHO_CP_AIR * fabric.ach * fabric.volume / 3600.0,
        c_m=fabric.c_m_spec * fabric.a_f,
        a_m=fabric.f_ms * fabric.a_f,
        a_tot=fabric.rat_sur * fabric.a_f,
    )


def split_gains(phi_int, phi_sol, net: FiveR1CNetwork):
    """Distribute internal and solar gains over air, surface and mass nodes.

    Returns ``(phi_ia, phi_st, phi_m)``. The fraction ``h_win/(9.1*a_tot)``
    of the radiant part is lost through the glazing path.
    """
    radiant = 0.5 * phi_int + phi_sol
    phi_ia = 0.5 * phi_int
    phi_m = net.a_m / net.a_tot * radiant
    phi_st = (1.0 - net.a_m / net.a_tot - net.h_win / (H_MS * net.a_tot)) * radiant
    return phi_ia, phi_st, phi_m


def plane_irradiance(window: Window, h_glo_hor, h_dir_nor, h_dif_hor, sol_zen, sol_azi):
    """Irradiance on a window plane, W/m2.

    Horizontal apertures see global horizontal irradiance; tilted ones see
    projected beam plus isotropic sky diffuse.
    """
    if window.tilt == 0.0:
        return np.maximum(np.asarray(h_glo_hor, dtype=float), 0.0)
    beta = math.radians(window.tilt)
    gamma = math.radians(window.azimuth)
    cos_inc = (np.cos(sol_zen) * math.cos(beta)
               + np.sin(sol_zen) * math.sin(beta) * np.cos(sol_azi - gamma))
    sun_up = np.cos(sol_zen) > 0.0
    beam = np.where(sun_up, h_dir_nor * np.maximum(cos_inc, 0.0), 0.0)
    diffuse = h_dif_hor * (1.0 + math.cos(beta)) / 2.0
    return np.maximum(beam + diffuse, 0.0)


def solar_gains_arrays(fabric: BuildingFabric, h_glo_hor, h_dir_nor, h_dif_hor, sol_zen, sol_azi):
    total = np.zeros(np.shape(h_glo_hor))
    for w in fabric.windows:
        total = total + w.g_value * w.area * plane_irradiance(w, h_glo_hor, h_dir_nor, h_dif_hor, sol_zen, sol_azi)
    return total


def solar_gains(sample, fabric: BuildingFabric) -> float:
    """Solar heat gain through all windows for one weather sample, W."""
    from .weather import solar_azimuth

    azi = solar_azimuth(sample.sol_tim, sample.clo_tim, sample.lat, sample.sol_zen)
    return float(solar_gains_arrays(fabric, sample.h_glo_hor, sample.h_dir_nor, sample.h_dif_hor,
                                    sample.sol_zen, azi))


# ---------------------------------------------------------------------------
# Time stepping
# ---------------------------------------------------------------------------

def _reduce(net: FiveR1CNetwork, t_ext, t_sup, phi_a, phi_s, h_ve=None):
    """Eliminate air and surface nodes.

    Returns ``(D, S, G, F0, h_ve_eff)`` such that
    ``t_sur = (h_mas*t_mas + S)/D`` and the net flow into the mass node is
    ``F0 - G*t_mas`` (excluding ``phi_m``).
    """
    hv = net.h_ve if h_ve is None else h_ve
    ht = net.h_the
    hm = net.h_mas
    h1 = ht * hv / (hv + ht)
    d = net.h_win + hm + h1
    s = net.h_win * t_ext + phi_s + ht * (hv * t_sup + phi_a) / (hv + ht)
    g = net.h_tra + hm * (net.h_win + h1) / d
    f0 = hm * s / d + net.h_tra * t_ext
    return d, s, g, f0, hv


def _advance(net, t_mas, t_ext, t_sup, phi_a, phi_s, phi_m, dt, h_ve=None):
    d, s, g, f0, hv = _reduce(net, t_ext, t_sup, phi_a, phi_s, h_ve)
    f = f0 + phi_m
    k = net.c_m / dt
    t_mas_new = ((k - 0.5 * g) * t_mas + f) / (k + 0.5 * g)
    t_sur = (net.h_mas * t_mas_new + s) / d
    t_air = (hv * t_sup + net.h_the * t_sur + phi_a) / (hv + net.h_the)
    return t_mas_new, t_air, t_sur


def node_temperatures(net: FiveR1CNetwork, t_mas, t_ext, t_sup, phi_ia, phi_st):
    """Air and surface temperatures consistent with a given mass temperature."""
    d, s, _, _, hv = _reduce(net, t_ext, t_sup, phi_ia, phi_st)
    t_sur = (net.h_mas * t_mas + s) / d
    t_air = (hv * t_sup + net.h_the * t_sur + phi_ia) / (hv + net.h_the)
    return t_air, t_sur


def reduced_conductance(net: FiveR1CNetwork) -> float:
    """Effective conductance from the mass node to the boundary with air and surface eliminated."""
    return _reduce(net, 0.0, 0.0, 0.0, 0.0)[2]


def time_constant(net: FiveR1CNetwork) -> float:
    return net.c_m / reduced_conductance(net)


def step_zone(net: FiveR1CNetwork, state: ZoneState, t_ext: float, t_sup: float, phi_int: float,
              phi_sol: float, phi_hc: float, dt: float, radiative_fraction: float = 0.0):
    """Advance the zone by ``dt`` seconds with inputs held constant over the step.

    ``phi_hc`` is split between the air node and (``radiative_fraction``)
    the surface node. Returns ``(state, t_air, t_sur)`` with node
    temperatures evaluated at the end of the step.
    """
    if not dt > 0:
        raise ValueError("dt must be positive")
    phi_ia, phi_st, phi_m = split_gains(phi_int, phi_sol, net)
    phi_a = phi_ia + (1.0 - radiative_fraction) * phi_hc
    phi_s = phi_st + radiative_fraction * phi_hc
    t_mas, t_air, t_sur = _advance(net, state.t_mas, t_ext, t_sup, phi_a, phi_s, phi_m, dt)
    return ZoneState(t_mas, t_air, t_sur), t_air, t_sur


def step_zone_valve(net: FiveR1CNetwork, state: ZoneState, t_ext: float, t_sup: float,
                    phi_int: float, phi_sol: float, valve_gain: float, t_target: float, dt: float):
    """Advance the zone with a proportional heat input ``valve_gain*(t_target - t_air)``.

    The heat input depends on the end-of-step air temperature and is
    eliminated in the same algebraic solve as the air node, so no
    iteration is needed. Returns ``(state, t_air, t_sur, phi_hc)``.
    """
    phi_ia, phi_st, phi_m = split_gains(phi_int, phi_sol, net)
    hv = net.h_ve + valve_gain
    t_sup_eff = (net.h_ve * t_sup + valve_gain * t_target) / hv
    t_mas, t_air, t_sur = _advance(net, state.t_mas, t_ext, t_sup_eff, phi_ia, phi_st, phi_m, dt, h_ve=hv)
    phi_hc = valve_gain * (t_target - t_air)
    return ZoneState(t_mas, t_air, t_sur), t_air, t_sur, phi_hc


def steady_state(net: FiveR1CNetwork, t_ext: float, t_sup: float, phi_int: float, phi_sol: float,
                 phi_hc: float, radiative_fraction: float = 0.0):
    """Solve the three nodal balances with zero mass-node storage.

    Returns ``(t_air, t_sur, t_mas)``.
    """
    phi_ia, phi_st, phi_m = split_gains(phi_int, phi_sol, net)
    phi_a = phi_ia + (1.0 - radiative_fraction) * phi_hc
    phi_s = phi_st + radiative_fraction * phi_hc
    a = np.array([
        [net.h_ve + net.h_the, -net.h_the, 0.0],
        [-net.h_the, net.h_win + net.h_the + net.h_mas, -net.h_mas],
        [0.0, -net.h_mas, net.h_mas + net.h_tra],
    ])
    b = np.array([
        net.h_ve * t_sup + phi_a,
        net.h_win * t_ext + phi_s,
        net.h_tra * t_ext + phi_m,
    ])
    t_air, t_sur, t_mas = np.linalg.solve(a, b)
    return float(t_air), float(t_sur), float(t_mas)


def design_heat_load(net: FiveR1CNetwork, t_ext: float, t_air: float) -> float:
    """Steady heating power holding ``t_air`` at ``t_ext`` (``t_sup = t_ext``, no gains)."""
    base = steady_state(net, t_ext, t_ext, 0.0, 0.0, 0.0)[0]
    unit = steady_state(net, t_ext, t_ext, 0.0, 0.0, 1.0)[0] - base
    return (t_air - base) / unit
