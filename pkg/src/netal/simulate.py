"""Synthetic KDD-format traffic generator.

Builds a corpus with the canonical per-attack record counts of the 10%
KDD-Cup-1999 subset (smurf. 280790, neptune. 107201, ..., nmap. 231,
97278 normals, plus a dozen sub-threshold attack types). Attack vectors
are template-based with realistic signatures: each major attack has a
dominant crisp subtype and, for several of them, a rarer "hard" subtype
whose feature values sit between normal traffic and the crisp cluster,
matching only part of the main signature. Normal traffic includes a small
heavy-tailed population of extreme-but-legitimate sessions (long bulk
transfers), which is what an unsupervised outlier ranking surfaces first.

Every subtype remains exactly separable from normal traffic (gaps are
built into the value grids), so a fully supervised learner can reach
perfect detection on any of the per-attack datasets.
"""

from __future__ import annotations

import numpy as np

from .kdd import CATEGORICAL_NAMES, CONTINUOUS_NAMES, KddRecords, NORMAL_LABEL

# per-attack record counts of the 10% KDD subset
ATTACK_COUNTS = {
    "smurf.": 280790,
    "neptune.": 107201,
    "back.": 2203,
    "satan.": 1589,
    "ipsweep.": 1247,
    "portsweep.": 1040,
    "warezclient.": 1020,
    "teardrop.": 979,
    "pod.": 264,
    "nmap.": 231,
}

N_NORMAL = 97278

# below the 100-occurrence inclusion threshold; present in the corpus only
RARE_ATTACK_COUNTS = {
    "guess_passwd.": 53,
    "buffer_overflow.": 30,
    "land.": 21,
    "warezmaster.": 20,
    "imap.": 12,
    "rootkit.": 10,
    "loadmodule.": 9,
    "ftp_write.": 8,
    "multihop.": 7,
    "phf.": 4,
    "perl.": 3,
    "spy.": 2,
}

_CONT = {name: j for j, name in enumerate(CONTINUOUS_NAMES)}
_CAT = {name: j for j, name in enumerate(CATEGORICAL_NAMES)}


def _pick(rng, n, values, p=None):
    return rng.choice(np.asarray(values), size=n, p=p)


def _iuni(rng, n, lo, hi):
    return rng.integers(lo, hi + 1, size=n).astype(np.float64)


def _runi(rng, n, lo, hi, nd=2):
    return np.round(rng.uniform(lo, hi, size=n), nd)


def _ilog(rng, n, lo, hi):
    return np.floor(10 ** rng.uniform(np.log10(lo), np.log10(hi), size=n))


def _grid(rng, n, lo, hi, step):
    vals = np.arange(lo, hi + step / 2, step)
    return rng.choice(vals, size=n)


class _Group:
    """One template group: n rows sharing a label and value recipe."""

    def __init__(self, n, label, rng):
        self.n = n
        self.label = label
        self.rng = rng
        self.cont = np.zeros((n, len(CONTINUOUS_NAMES)))
        self.cat = np.empty((n, len(CATEGORICAL_NAMES)), dtype="<U24")
        # baseline shape of an unremarkable connection
        self.cat[:, _CAT["protocol_type"]] = "tcp"
        self.cat[:, _CAT["service"]] = "other"
        self.cat[:, _CAT["flag"]] = "SF"
        self["same_srv_rate"] = 1.0
        self["count"] = _iuni(rng, n, 1, 8)
        self["srv_count"] = self["count"]
        self["dst_host_count"] = _grid(rng, n, 1, 170, 1)
        self["dst_host_srv_count"] = _iuni(rng, n, 1, 60)
        self["dst_host_same_srv_rate"] = _runi(rng, n, 0.5, 1.0)
        self["dst_host_same_src_port_rate"] = _runi(rng, n, 0.0, 0.3)

    def __setitem__(self, name, value):
        if name in _CAT:
            self.cat[:, _CAT[name]] = value
        else:
            self.cont[:, _CONT[name]] = value

    def __getitem__(self, name):
        if name in _CAT:
            return self.cat[:, _CAT[name]]
        return self.cont[:, _CONT[name]]


def _normal_groups(rng, total):
    """Mixture of benign traffic profiles summing to exactly `total` rows."""
    weights = {
        "http": 0.54,
        "smtp": 0.09,
        "domain_u": 0.08,
        "ftp_data": 0.07,
        "misc_tcp": 0.07,
        "private_udp": 0.05,
        "telnet": 0.035,
        "ftp": 0.02,
        "eco_i": 0.015,
        "ecr_i": 0.015,
        "rej": 0.007,
        "s0": 0.003,
        "elephant": 0.005,
    }
    names = list(weights)
    raw = np.array([weights[k] * total for k in names])
    counts = np.floor(raw).astype(int)
    # largest remainder keeps the exact total
    for i in np.argsort(raw - np.floor(raw))[::-1][: total - counts.sum()]:
        counts[i] += 1
    sizes = dict(zip(names, counts))
    groups = []

    g = _Group(sizes["http"], NORMAL_LABEL, rng)
    g["service"] = "http"
    g["duration"] = _pick(rng, g.n, [0, 0, 0, 0, 1, 1, 2, 3, 5])
    g["src_bytes"] = _pick(rng, g.n, [105, 143, 181, 199, 212, 217, 235, 239, 245, 258, 287, 300, 310, 334, 365])
    g["dst_bytes"] = _pick(rng, g.n, [324, 486, 624, 750, 1085, 1337, 2032, 3894, 5450, 8314, 12762, 25400, 48200])
    g["flag"] = _pick(rng, g.n, ["SF", "RSTR"], p=[0.995, 0.005])
    g["logged_in"] = 1.0
    g["hot"] = _pick(rng, g.n, [0, 0, 0, 0, 0, 0, 1, 2])
    g["count"] = _iuni(rng, g.n, 1, 20)
    g["srv_count"] = np.maximum(1, g["count"] - _iuni(rng, g.n, 0, 3))
    g["dst_host_srv_count"] = _iuni(rng, g.n, 30, 255)
    g["dst_host_same_srv_rate"] = _runi(rng, g.n, 0.8, 1.0)
    groups.append(g)

    g = _Group(sizes["smtp"], NORMAL_LABEL, rng)
    g["service"] = "smtp"
    g["duration"] = _pick(rng, g.n, [0, 0, 1, 2])
    g["src_bytes"] = _grid(rng, g.n, 520, 1600, 20)
    g["dst_bytes"] = _pick(rng, g.n, [250, 293, 308, 329, 333, 341, 369, 400])
    g["logged_in"] = 1.0
    g["count"] = _iuni(rng, g.n, 1, 12)
    g["srv_count"] = g["count"]
    groups.append(g)

    g = _Group(sizes["domain_u"], NORMAL_LABEL, rng)
    g["protocol_type"] = "udp"
    g["service"] = "domain_u"
    g["src_bytes"] = _pick(rng, g.n, [42, 43, 44, 45, 46, 51, 55, 60])
    g["dst_bytes"] = _pick(rng, g.n, [42, 44, 46, 74, 87, 105, 132, 146, 170, 199])
    g["count"] = _iuni(rng, g.n, 1, 10)
    g["srv_count"] = g["count"] + _iuni(rng, g.n, 0, 4)
    g["dst_host_same_src_port_rate"] = _runi(rng, g.n, 0.3, 1.0)
    groups.append(g)

    # bulk transfers: duration bimodal, either push (big src) or nothing back
    g = _Group(sizes["ftp_data"], NORMAL_LABEL, rng)
    g["service"] = "ftp_data"
    half = g.n // 2
    dur = np.concatenate([_iuni(rng, half, 0, 40), _iuni(rng, g.n - half, 200, 2000)])
    g["duration"] = rng.permutation(dur)
    src = _ilog(rng, g.n, 3000, 2_000_000)
    src[rng.random(g.n) < 0.25] = 0.0
    g["src_bytes"] = src
    g["dst_bytes"] = 0.0
    g["logged_in"] = 1.0
    g["count"] = _iuni(rng, g.n, 1, 6)
    g["srv_count"] = g["count"]
    g["dst_host_srv_diff_host_rate"] = _runi(rng, g.n, 0.0, 0.2)
    groups.append(g)

    g = _Group(sizes["misc_tcp"], NORMAL_LABEL, rng)
    g["service"] = _pick(
        rng, g.n,
        ["finger", "auth", "time", "pop_3", "ssh", "irc", "X11", "domain", "ntp_u", "urp_i", "other"],
    )
    g["duration"] = _pick(rng, g.n, [0, 0, 0, 1, 2, 4, 8, 16])
    g["src_bytes"] = _grid(rng, g.n, 16, 240, 2)
    g["dst_bytes"] = _grid(rng, g.n, 0, 4000, 50)
    g["logged_in"] = _pick(rng, g.n, [0.0, 1.0], p=[0.6, 0.4])
    g["diff_srv_rate"] = _runi(rng, g.n, 0.0, 0.3)
    g["srv_diff_host_rate"] = _runi(rng, g.n, 0.0, 0.35)
    g["dst_host_diff_srv_rate"] = _runi(rng, g.n, 0.0, 0.25)
    groups.append(g)

    g = _Group(sizes["private_udp"], NORMAL_LABEL, rng)
    g["protocol_type"] = "udp"
    g["service"] = "private"
    g["src_bytes"] = _pick(rng, g.n, [28, 40, 45, 105, 146])
    g["dst_bytes"] = _pick(rng, g.n, [0, 28, 44, 105, 146])
    g["count"] = _iuni(rng, g.n, 1, 10)
    g["srv_count"] = g["count"]
    g["diff_srv_rate"] = _runi(rng, g.n, 0.0, 0.3)
    g["srv_diff_host_rate"] = _runi(rng, g.n, 0.0, 0.35)
    g["same_srv_rate"] = _runi(rng, g.n, 0.5, 1.0)
    g["dst_host_same_src_port_rate"] = _runi(rng, g.n, 0.3, 1.0)
    groups.append(g)

    g = _Group(sizes["telnet"], NORMAL_LABEL, rng)
    g["service"] = "telnet"
    g["duration"] = _ilog(rng, g.n, 40, 1000)
    g["src_bytes"] = _grid(rng, g.n, 120, 3000, 8)
    g["dst_bytes"] = _grid(rng, g.n, 300, 20000, 100)
    g["logged_in"] = 1.0
    g["hot"] = _pick(rng, g.n, [0, 0, 0, 1])
    g["root_shell"] = _pick(rng, g.n, [0.0, 1.0], p=[0.99, 0.01])
    g["num_file_creations"] = _pick(rng, g.n, [0, 0, 0, 1, 2])
    groups.append(g)

    g = _Group(sizes["ftp"], NORMAL_LABEL, rng)
    g["service"] = "ftp"
    g["duration"] = _iuni(rng, g.n, 0, 60)
    g["src_bytes"] = _grid(rng, g.n, 100, 2000, 4)
    g["dst_bytes"] = _grid(rng, g.n, 100, 10000, 20)
    g["logged_in"] = 1.0
    g["hot"] = _pick(rng, g.n, [0, 0, 1])
    g["is_guest_login"] = _pick(rng, g.n, [0.0, 1.0], p=[0.75, 0.25])
    g["num_file_creations"] = _pick(rng, g.n, [0, 0, 1])
    groups.append(g)

    g = _Group(sizes["eco_i"], NORMAL_LABEL, rng)
    g["protocol_type"] = "icmp"
    g["service"] = "eco_i"
    g["src_bytes"] = _pick(rng, g.n, [8, 18, 20, 30, 64])
    g["count"] = _iuni(rng, g.n, 1, 4)
    g["srv_count"] = g["count"]
    g["dst_host_count"] = _iuni(rng, g.n, 1, 80)
    g["dst_host_same_src_port_rate"] = _runi(rng, g.n, 0.5, 1.0)
    groups.append(g)

    g = _Group(sizes["ecr_i"], NORMAL_LABEL, rng)
    g["protocol_type"] = "icmp"
    g["service"] = "ecr_i"
    g["src_bytes"] = _pick(rng, g.n, [8, 64, 520, 1032])
    g["count"] = _iuni(rng, g.n, 1, 30)
    g["srv_count"] = g["count"]
    g["dst_host_count"] = _iuni(rng, g.n, 1, 80)
    g["dst_host_srv_count"] = _iuni(rng, g.n, 1, 60)
    g["dst_host_same_src_port_rate"] = _runi(rng, g.n, 0.5, 1.0)
    groups.append(g)

    # legitimate rejected / timed-out connections
    g = _Group(sizes["rej"], NORMAL_LABEL, rng)
    g["service"] = _pick(rng, g.n, ["finger", "auth", "http"])
    g["flag"] = "REJ"
    g["count"] = _iuni(rng, g.n, 1, 6)
    g["srv_count"] = g["count"]
    g["rerror_rate"] = 1.0
    g["srv_rerror_rate"] = 1.0
    g["dst_host_rerror_rate"] = _runi(rng, g.n, 0.5, 1.0)
    groups.append(g)

    g = _Group(sizes["s0"], NORMAL_LABEL, rng)
    g["service"] = _pick(rng, g.n, ["telnet", "http"])
    g["flag"] = "S0"
    g["count"] = _iuni(rng, g.n, 1, 4)
    g["srv_count"] = _iuni(rng, g.n, 1, 2)
    g["serror_rate"] = 1.0
    g["srv_serror_rate"] = 1.0
    g["dst_host_serror_rate"] = _runi(rng, g.n, 0.5, 1.0)
    groups.append(g)

    # heavy-tailed but legitimate bulk sessions; these top any outlier ranking
    g = _Group(sizes["elephant"], NORMAL_LABEL, rng)
    g["service"] = _pick(rng, g.n, ["ftp_data", "ftp", "telnet", "http"])
    g["duration"] = _ilog(rng, g.n, 1000, 60000)
    up = rng.random(g.n) < 0.6
    src = np.where(up, _ilog(rng, g.n, 1_000_000, 700_000_000), _grid(rng, g.n, 100, 2000, 4))
    dst = np.where(up, _grid(rng, g.n, 300, 20000, 100), _ilog(rng, g.n, 1_000_000, 300_000_000))
    g["src_bytes"] = src
    g["dst_bytes"] = dst
    g["logged_in"] = 1.0
    g["hot"] = _pick(rng, g.n, [0, 0, 1])
    g["count"] = _iuni(rng, g.n, 1, 4)
    g["srv_count"] = g["count"]
    groups.append(g)

    return groups


def _split_counts(n, fractions):
    counts = [int(round(n * f)) for f in fractions[:-1]]
    counts.append(n - sum(counts))
    return counts


def _attack_groups(rng, counts):
    groups = []

    # -- smurf: ICMP echo-reply flood, massive per-host connection counts
    g = _Group(counts["smurf."], "smurf.", rng)
    g["protocol_type"] = "icmp"
    g["service"] = "ecr_i"
    g["src_bytes"] = _pick(rng, g.n, [1032, 520], p=[0.9, 0.1])
    g["count"] = _iuni(rng, g.n, 180, 511)
    g["srv_count"] = g["count"]
    g["dst_host_count"] = 255.0
    g["dst_host_srv_count"] = 255.0
    g["dst_host_same_srv_rate"] = 1.0
    g["dst_host_same_src_port_rate"] = 1.0
    groups.append(g)

    # -- neptune: SYN flood, no payload, saturated error rates
    g = _Group(counts["neptune."], "neptune.", rng)
    g["service"] = _pick(
        rng, g.n,
        ["private", "http", "telnet", "ftp", "finger", "pop_3", "smtp", "auth"],
        p=[0.60, 0.08, 0.07, 0.05, 0.06, 0.05, 0.05, 0.04],
    )
    sflag = rng.random(g.n) < 0.92
    g["flag"] = np.where(sflag, "S0", "REJ")
    g["count"] = _iuni(rng, g.n, 100, 511)
    g["srv_count"] = _iuni(rng, g.n, 1, 16)
    g["serror_rate"] = np.where(sflag, _pick(rng, g.n, [1.0, 0.99, 0.96, 0.94]), 0.0)
    g["srv_serror_rate"] = g["serror_rate"]
    g["rerror_rate"] = np.where(sflag, 0.0, 1.0)
    g["same_srv_rate"] = _runi(rng, g.n, 0.0, 0.16)
    g["diff_srv_rate"] = _runi(rng, g.n, 0.05, 0.20)
    g["dst_host_count"] = 255.0
    g["dst_host_srv_count"] = _iuni(rng, g.n, 1, 26)
    g["dst_host_same_srv_rate"] = _runi(rng, g.n, 0.0, 0.10)
    g["dst_host_serror_rate"] = np.where(sflag, _runi(rng, g.n, 0.9, 1.0), 0.0)
    g["dst_host_srv_serror_rate"] = g["dst_host_serror_rate"]
    groups.append(g)

    # -- back: HTTP DoS with an oversized request payload
    n_easy, n_hard = _split_counts(counts["back."], [0.95, 0.05])
    g = _Group(n_easy, "back.", rng)
    g["service"] = "http"
    g["duration"] = _pick(rng, g.n, [0, 1, 2, 4])
    g["src_bytes"] = _grid(rng, g.n, 53140, 55980, 20)
    g["dst_bytes"] = _grid(rng, g.n, 7800, 9400, 20)
    g["hot"] = 2.0
    g["logged_in"] = 1.0
    g["count"] = _iuni(rng, g.n, 2, 10)
    g["srv_count"] = g["count"]
    g["dst_host_srv_count"] = _iuni(rng, g.n, 200, 255)
    g["dst_host_same_srv_rate"] = 1.0
    groups.append(g)
    # hard: trimmed payload, connection reset by the server
    g = _Group(n_hard, "back.", rng)
    g["service"] = "http"
    g["flag"] = "RSTR"
    g["duration"] = _pick(rng, g.n, [0, 1, 2])
    g["src_bytes"] = _grid(rng, g.n, 392, 518, 2)
    g["dst_bytes"] = _grid(rng, g.n, 1200, 2600, 20)
    g["hot"] = 2.0
    g["logged_in"] = 1.0
    g["count"] = _iuni(rng, g.n, 2, 8)
    g["srv_count"] = g["count"]
    groups.append(g)

    # -- satan: aggressive multi-service probe
    n_easy, n_hard = _split_counts(counts["satan."], [0.85, 0.15])
    g = _Group(n_easy, "satan.", rng)
    g["service"] = _pick(
        rng, g.n,
        ["private", "other", "finger", "http", "telnet", "smtp", "time", "domain"],
        p=[0.55, 0.10, 0.07, 0.07, 0.06, 0.05, 0.05, 0.05],
    )
    r = rng.random(g.n)
    g["flag"] = np.where(r < 0.5, "REJ", np.where(r < 0.78, "S0", "SF"))
    g["src_bytes"] = _pick(rng, g.n, [0, 0, 0, 1, 4, 6])
    g["count"] = _iuni(rng, g.n, 2, 60)
    g["srv_count"] = _iuni(rng, g.n, 1, 8)
    g["rerror_rate"] = np.where(g["flag"] == "REJ", _runi(rng, g.n, 0.9, 1.0), 0.0)
    g["srv_rerror_rate"] = g["rerror_rate"]
    g["serror_rate"] = np.where(g["flag"] == "S0", _runi(rng, g.n, 0.9, 1.0), 0.0)
    g["srv_serror_rate"] = g["serror_rate"]
    g["same_srv_rate"] = _runi(rng, g.n, 0.0, 0.25)
    g["diff_srv_rate"] = _runi(rng, g.n, 0.5, 1.0)
    g["srv_diff_host_rate"] = _runi(rng, g.n, 0.5, 0.85)
    g["dst_host_count"] = 255.0
    g["dst_host_diff_srv_rate"] = _runi(rng, g.n, 0.55, 1.0)
    g["dst_host_rerror_rate"] = np.where(g["flag"] == "REJ", _runi(rng, g.n, 0.8, 1.0), 0.0)
    groups.append(g)
    # hard: slow single-port UDP sweep, only rate fingerprints left
    g = _Group(n_hard, "satan.", rng)
    g["protocol_type"] = "udp"
    g["service"] = "private"
    g["src_bytes"] = _pick(rng, g.n, [44, 45, 46])
    g["dst_bytes"] = _pick(rng, g.n, [44, 45, 105])
    g["count"] = _iuni(rng, g.n, 1, 4)
    g["srv_count"] = g["count"]
    g["diff_srv_rate"] = _runi(rng, g.n, 0.34, 0.44)
    g["srv_diff_host_rate"] = _runi(rng, g.n, 0.48, 0.58)
    g["same_srv_rate"] = _runi(rng, g.n, 0.55, 0.70)
    g["dst_host_diff_srv_rate"] = _runi(rng, g.n, 0.08, 0.16)
    g["dst_host_same_src_port_rate"] = _runi(rng, g.n, 0.3, 1.0)
    groups.append(g)

    # -- ipsweep: ICMP echo sweep across many hosts
    n_easy, n_hard = _split_counts(counts["ipsweep."], [0.85, 0.15])
    g = _Group(n_easy, "ipsweep.", rng)
    g["protocol_type"] = "icmp"
    g["service"] = "eco_i"
    g["src_bytes"] = _pick(rng, g.n, [8, 18])
    g["count"] = _iuni(rng, g.n, 1, 4)
    g["srv_count"] = g["count"]
    g["srv_diff_host_rate"] = _runi(rng, g.n, 0.55, 0.95)
    g["dst_host_count"] = _iuni(rng, g.n, 230, 255)
    g["dst_host_same_src_port_rate"] = _runi(rng, g.n, 0.96, 1.0)
    groups.append(g)
    # hard: throttled sweep, host fan-out partially aged out of the window
    g = _Group(n_hard, "ipsweep.", rng)
    g["protocol_type"] = "icmp"
    g["service"] = "eco_i"
    g["src_bytes"] = 8.0
    g["count"] = _iuni(rng, g.n, 1, 3)
    g["srv_count"] = g["count"]
    g["srv_diff_host_rate"] = _runi(rng, g.n, 0.55, 0.95)
    g["dst_host_count"] = _iuni(rng, g.n, 185, 215)
    g["dst_host_same_src_port_rate"] = _runi(rng, g.n, 0.2, 0.4)
    groups.append(g)

    # -- portsweep: sequential port scan on one host
    n_easy, n_hard = _split_counts(counts["portsweep."], [0.80, 0.20])
    g = _Group(n_easy, "portsweep.", rng)
    g["service"] = _pick(
        rng, g.n,
        ["private", "other", "http", "smtp", "domain", "ssh", "pop_3"],
        p=[0.62, 0.10, 0.07, 0.06, 0.05, 0.05, 0.05],
    )
    r = rng.random(g.n)
    g["flag"] = np.where(r < 0.45, "REJ", np.where(r < 0.9, "S0", "SF"))
    g["src_bytes"] = _pick(rng, g.n, [0, 0, 0, 1, 2, 4])
    g["count"] = _iuni(rng, g.n, 1, 30)
    g["srv_count"] = _iuni(rng, g.n, 1, 4)
    g["rerror_rate"] = np.where(g["flag"] == "REJ", 1.0, 0.0)
    g["srv_rerror_rate"] = g["rerror_rate"]
    g["serror_rate"] = np.where(g["flag"] == "S0", 1.0, 0.0)
    g["srv_serror_rate"] = g["serror_rate"]
    g["same_srv_rate"] = _runi(rng, g.n, 0.0, 0.20)
    g["diff_srv_rate"] = _runi(rng, g.n, 0.6, 1.0)
    g["dst_host_count"] = 255.0
    g["dst_host_diff_srv_rate"] = _runi(rng, g.n, 0.6, 1.0)
    g["dst_host_same_src_port_rate"] = _runi(rng, g.n, 0.9, 1.0)
    groups.append(g)
    # hard: polite low-rate scan of open services only
    g = _Group(n_hard, "portsweep.", rng)
    g["service"] = _pick(rng, g.n, ["finger", "time", "auth"])
    g["src_bytes"] = _iuni(rng, g.n, 1, 8)
    g["dst_bytes"] = _iuni(rng, g.n, 1, 12)
    g["count"] = _iuni(rng, g.n, 1, 3)
    g["srv_count"] = _iuni(rng, g.n, 1, 2)
    g["same_srv_rate"] = _runi(rng, g.n, 0.55, 0.75)
    g["diff_srv_rate"] = _runi(rng, g.n, 0.38, 0.50)
    g["dst_host_diff_srv_rate"] = _runi(rng, g.n, 0.30, 0.44)
    g["dst_host_same_src_port_rate"] = _runi(rng, g.n, 0.55, 0.75)
    groups.append(g)

    # -- warezclient: bulk pirated-content downloads over FTP
    n_data, n_ctl, n_hard = _split_counts(counts["warezclient."], [0.525, 0.225, 0.25])
    g = _Group(n_data, "warezclient.", rng)
    g["service"] = "ftp_data"
    g["duration"] = _iuni(rng, g.n, 0, 40)
    g["src_bytes"] = _grid(rng, g.n, 400_000, 5_500_000, 5000)
    g["is_guest_login"] = 1.0
    g["logged_in"] = 1.0
    g["count"] = _iuni(rng, g.n, 1, 5)
    g["srv_count"] = g["count"]
    g["dst_host_srv_diff_host_rate"] = _runi(rng, g.n, 0.30, 0.50)
    groups.append(g)
    g = _Group(n_ctl, "warezclient.", rng)
    g["service"] = "ftp"
    g["duration"] = _iuni(rng, g.n, 2, 120)
    g["src_bytes"] = _grid(rng, g.n, 300, 2000, 4)
    g["dst_bytes"] = _grid(rng, g.n, 300, 4000, 20)
    g["is_guest_login"] = 1.0
    g["logged_in"] = 1.0
    g["hot"] = _iuni(rng, g.n, 4, 28)
    g["count"] = _iuni(rng, g.n, 1, 5)
    g["srv_count"] = g["count"]
    g["dst_host_srv_diff_host_rate"] = _runi(rng, g.n, 0.30, 0.50)
    groups.append(g)
    # hard: authenticated account, mid-sized pulls, fan-out fingerprint only
    g = _Group(n_hard, "warezclient.", rng)
    g["service"] = "ftp_data"
    g["duration"] = _iuni(rng, g.n, 0, 30)
    g["src_bytes"] = _grid(rng, g.n, 180_000, 340_000, 2000)
    g["logged_in"] = 1.0
    g["count"] = _iuni(rng, g.n, 2, 4)
    g["srv_count"] = g["count"]
    g["dst_host_srv_diff_host_rate"] = _runi(rng, g.n, 0.28, 0.42)
    groups.append(g)

    # -- teardrop: overlapping UDP fragments
    g = _Group(counts["teardrop."], "teardrop.", rng)
    g["protocol_type"] = "udp"
    g["service"] = "private"
    g["src_bytes"] = 28.0
    g["wrong_fragment"] = _pick(rng, g.n, [3.0, 1.0], p=[0.8, 0.2])
    g["count"] = _iuni(rng, g.n, 1, 60)
    g["srv_count"] = g["count"]
    groups.append(g)

    # -- pod: oversized fragmented ICMP echo
    g = _Group(counts["pod."], "pod.", rng)
    g["protocol_type"] = "icmp"
    g["service"] = "ecr_i"
    g["src_bytes"] = _pick(rng, g.n, [1480.0, 564.0], p=[0.85, 0.15])
    g["wrong_fragment"] = 1.0
    g["count"] = _iuni(rng, g.n, 1, 16)
    g["srv_count"] = g["count"]
    g["dst_host_count"] = _iuni(rng, g.n, 1, 80)
    g["dst_host_same_src_port_rate"] = _runi(rng, g.n, 0.5, 1.0)
    groups.append(g)

    # -- nmap: port scans; a stealthier UDP variant hides in plain traffic
    n_easy, n_hard = _split_counts(counts["nmap."], [0.72, 0.28])
    g = _Group(n_easy, "nmap.", rng)
    g["service"] = _pick(rng, g.n, ["private", "other"], p=[0.7, 0.3])
    g["flag"] = "SH"
    g["src_bytes"] = _pick(rng, g.n, [20, 24, 28])
    g["count"] = _iuni(rng, g.n, 1, 3)
    g["srv_count"] = _iuni(rng, g.n, 1, 2)
    g["srv_diff_host_rate"] = _runi(rng, g.n, 0.5, 0.9)
    g["dst_host_count"] = _iuni(rng, g.n, 2, 30)
    g["dst_host_srv_count"] = _iuni(rng, g.n, 1, 8)
    g["dst_host_same_src_port_rate"] = _runi(rng, g.n, 0.9, 1.0)
    g["dst_host_rerror_rate"] = _runi(rng, g.n, 0.0, 0.06)
    groups.append(g)
    g = _Group(n_hard, "nmap.", rng)
    g["protocol_type"] = "udp"
    g["service"] = "private"
    g["src_bytes"] = _grid(rng, g.n, 280, 320, 4)
    g["count"] = _iuni(rng, g.n, 1, 3)
    g["srv_count"] = _iuni(rng, g.n, 1, 2)
    g["srv_diff_host_rate"] = _runi(rng, g.n, 0.44, 0.56)
    g["dst_host_count"] = _iuni(rng, g.n, 2, 30)
    g["dst_host_srv_count"] = _iuni(rng, g.n, 1, 8)
    g["dst_host_same_src_port_rate"] = _runi(rng, g.n, 0.60, 0.80)
    g["dst_host_rerror_rate"] = _runi(rng, g.n, 0.0, 0.06)
    groups.append(g)

    return groups


def _rare_groups(rng, counts):
    """Sub-threshold attack types; only present to exercise the cutoff."""
    groups = []
    for label, n in counts.items():
        g = _Group(n, label, rng)
        g["service"] = _pick(rng, g.n, ["telnet", "ftp", "http", "imap4", "login"])
        g["duration"] = _iuni(rng, g.n, 0, 300)
        g["src_bytes"] = _grid(rng, g.n, 60, 4000, 4)
        g["dst_bytes"] = _grid(rng, g.n, 60, 8000, 20)
        g["logged_in"] = _pick(rng, g.n, [0.0, 1.0])
        g["hot"] = _pick(rng, g.n, [0, 1, 2, 4])
        g["num_compromised"] = _pick(rng, g.n, [0, 0, 1, 2])
        g["root_shell"] = _pick(rng, g.n, [0.0, 0.0, 1.0])
        g["num_failed_logins"] = _pick(rng, g.n, [0, 0, 0, 1, 3])
        groups.append(g)
    return groups


def generate_corpus(seed: int = 7, scale: float = 1.0, include_rare: bool = True) -> KddRecords:
    """Generate the full synthetic corpus, shuffled into one record table.

    scale < 1 shrinks every group proportionally (floor 1 row) for quick
    demos and unit tests; only scale=1.0 reproduces the canonical counts.
    """
    if not 0 < scale <= 1.0:
        raise ValueError("scale must be in (0, 1]")
    rng = np.random.default_rng(seed)

    def sized(n):
        return max(1, int(round(n * scale))) if scale < 1.0 else n

    attack_counts = {k: sized(v) for k, v in ATTACK_COUNTS.items()}
    groups = _normal_groups(rng, sized(N_NORMAL))
    groups += _attack_groups(rng, attack_counts)
    if include_rare:
        rare = {k: sized(v) for k, v in RARE_ATTACK_COUNTS.items()}
        groups += _rare_groups(rng, rare)

    cont = np.concatenate([g.cont for g in groups], axis=0)
    cat = np.concatenate([g.cat for g in groups], axis=0)
    labels = np.concatenate(
        [np.full(g.n, g.label, dtype="<U24") for g in groups], axis=0
    )
    order = rng.permutation(cont.shape[0])
    return KddRecords(cont[order], cat[order], labels[order])


def write_corpus(path, seed: int = 7, scale: float = 1.0, include_rare: bool = True) -> int:
    """Write a generated corpus as KDD CSV; returns the number of rows."""
    records = generate_corpus(seed=seed, scale=scale, include_rare=include_rare)
    with open(path, "w", encoding="utf-8") as fh:
        for line in records.to_lines():
            fh.write(line + "\n")
    return len(records)
