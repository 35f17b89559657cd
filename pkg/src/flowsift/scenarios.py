"""Reference metadata for the 13 CTU-13 capture scenarios.

Each scenario is one packet-capture session run against a different malware
sample; the fixture carries the total flow count, the label mix (percent of
flows per class), and the behavior traits of the malware involved. These are
the published characteristics of the dataset, embedded so code and tests can
refer to them without the multi-gigabyte captures present.

Trait abbreviations: IRC command channel, SPAM sending, CF click fraud,
PS port scan, DDoS attack traffic, P2P command channel, US UDP scan/spam
variants, HTTP-based command channel.
"""
from __future__ import annotations

from dataclasses import dataclass

from .errors import UnknownScenario

TRAIT_NAMES = ("IRC", "SPAM", "CF", "PS", "DDoS", "P2P", "US", "HTTP")


@dataclass(frozen=True)
class ScenarioMeta:
    scenario_id: int
    total_flows: int
    pct_botnet: float
    pct_normal: float
    pct_cnc: float
    pct_background: float
    traits: frozenset[str]


def _meta(sid, total, bot, normal, cnc, background, *traits):
    unknown = set(traits) - set(TRAIT_NAMES)
    if unknown:
        raise ValueError(f"unknown traits {unknown}")
    return ScenarioMeta(sid, total, bot, normal, cnc, background,
                        frozenset(traits))


SCENARIOS: dict[int, ScenarioMeta] = {m.scenario_id: m for m in (
    _meta(1, 2_824_636, 1.41, 1.07, 0.03, 97.47, "IRC", "SPAM", "CF"),
    _meta(2, 1_808_122, 1.04, 0.5, 0.11, 98.33, "IRC", "SPAM", "CF"),
    _meta(3, 4_710_638, 0.56, 2.48, 0.001, 96.94, "IRC", "PS", "US"),
    _meta(4, 1_121_076, 0.15, 2.25, 0.004, 97.58, "IRC", "DDoS", "US"),
    _meta(5, 129_832, 0.53, 3.6, 1.15, 95.7, "SPAM", "PS", "HTTP"),
    _meta(6, 558_919, 0.79, 1.34, 0.03, 97.83, "PS"),
    _meta(7, 114_077, 0.03, 1.47, 0.02, 98.47, "HTTP"),
    _meta(8, 2_954_230, 0.17, 2.46, 2.4, 97.32, "PS"),
    _meta(9, 2_753_884, 6.5, 1.57, 0.18, 91.7, "IRC", "SPAM", "CF", "PS"),
    _meta(10, 1_309_791, 8.11, 1.2, 0.002, 90.67, "IRC", "DDoS", "US"),
    _meta(11, 107_251, 7.6, 2.53, 0.002, 89.85, "IRC", "DDoS", "US"),
    _meta(12, 325_471, 0.65, 2.34, 0.007, 96.99, "DDoS"),
    _meta(13, 1_925_149, 2.01, 1.65, 0.06, 96.26, "SPAM", "PS", "HTTP"),
)}


def scenario_info(scenario_id: int) -> ScenarioMeta:
    """Look up the embedded metadata row for a capture scenario (1..13)."""
    try:
        return SCENARIOS[scenario_id]
    except KeyError:
        raise UnknownScenario(
            f"scenario_id must be 1..13, got {scenario_id}") from None
