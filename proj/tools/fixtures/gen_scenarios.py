#!/usr/bin/env python3
# Copyright 2026 The BGPSecX Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
# http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Writes the canned simulator scenarios S1-S4 and data/manifest.json.

Each scenario isolates one defense. All resources come from documentation
prefixes and private ASNs. The manifest records a SHA-256 digest for every
fixture file, so run this after gen_traces.py.

    python3 tools/fixtures/gen_scenarios.py data
"""

import hashlib
import json
import os
import sys

T0 = 1700000000
DAY = 86400
ATTACKER = 64999

ROA_HEADER = "ASN,IP Prefix,Max Length,Trust Anchor\n"


def write(path, text):
    os.makedirs(os.path.dirname(path), exist_ok=True)
    with open(path, "w", newline="\n") as f:
        f.write(text)


def dump_json(path, doc):
    write(path, json.dumps(doc, indent=2, sort_keys=False) + "\n")


def roa_csv(rows):
    return ROA_HEADER + "".join(f"AS{asn},{prefix},{maxlen},ta-doc\n" for asn, prefix, maxlen in rows)


def whitelist(ixp, members):
    return {
        "ixp": ixp,
        "version": 1,
        "members": [{"asn": asn, "prefixes": sorted(prefixes)} for asn, prefixes in sorted(members.items())],
    }


def route(ixp, prefix, path, time):
    return {"ixp": ixp, "prefix": prefix, "path": path, "member": path[0], "time": time}


# Legitimate announcements shared by the single-IXP scenarios:
# (member, origin, prefix).
BASE = [
    (65010, 65010, "192.0.2.0/26"),
    (65010, 65010, "192.0.2.64/26"),
    (65011, 65021, "192.0.2.128/26"),
    (65011, 65021, "2001:db8:11::/48"),
    (65012, 65012, "192.0.2.192/26"),
    (65012, 65022, "2001:db8:12::/48"),
    (65013, 65013, "203.0.113.0/25"),
    (65013, 65013, "2001:db8:13::/48"),
    (65014, 65024, "203.0.113.128/25"),
    (65014, 65014, "2001:db8:14::/48"),
]


def base_routes(ixp):
    out = []
    for i, (member, origin, prefix) in enumerate(BASE):
        path = [member] if member == origin else [member, origin]
        out.append(route(ixp, prefix, path, T0 + 60 * i))
    return out


def base_members():
    members = {}
    for member, _, prefix in BASE:
        members.setdefault(member, set()).add(prefix)
    return members


def scenario_s1(root):
    d = os.path.join(root, "s1")
    rows = []
    for _, origin, prefix in BASE:
        maxlen = int(prefix.split("/")[1])
        rows.append((origin, prefix, maxlen))
    write(os.path.join(d, "roas.csv"), roa_csv(rows))
    dump_json(os.path.join(d, "whitelist.json"), whitelist("ixp-a", base_members()))
    routes = base_routes("ixp-a")
    dump_json(os.path.join(d, "scenario.json"), {
        "seed": 11,
        "ixps": [{"id": "ixp-a", "roas": "roas.csv", "whitelists": ["whitelist.json"]}],
        "links": [],
        "routes": routes,
        "attacks": [{"kind": "ExactPrefixHijack", "victim": "192.0.2.0/26", "attacker": ATTACKER,
                     "ixp": "ixp-a", "at": 6}],
    })
    return {
        "id": "S1",
        "description": "Exact-prefix hijack of a ROA-covered prefix, rejected by origin validation",
        "dir": "scenarios/s1",
        "expected": {"attack": "ExactPrefixHijack", "defense": "roa", "action": "Reject",
                     "reasons": ["roa-invalid"], "injected": 1, "detected": 1, "false_positives": 0},
    }


def scenario_s2(root):
    d = os.path.join(root, "s2")
    # ROAs for the IPv6 routes only, so the victim is not ROA-covered.
    rows = [(origin, prefix, int(prefix.split("/")[1])) for _, origin, prefix in BASE if ":" in prefix]
    write(os.path.join(d, "roas.csv"), roa_csv(rows))
    members = base_members()
    members[65015] = {"198.51.100.0/25"}
    dump_json(os.path.join(d, "whitelist.json"), whitelist("ixp-a", members))
    routes = base_routes("ixp-a")
    routes.append(route("ixp-a", "198.51.100.0/25", [65015], T0 + 900))
    # Member 65013 announces a prefix its whitelist entry does not list.
    dump_json(os.path.join(d, "scenario.json"), {
        "seed": 22,
        "ixps": [{"id": "ixp-a", "roas": "roas.csv", "whitelists": ["whitelist.json"]}],
        "links": [],
        "routes": routes,
        "attacks": [{"kind": "ExactPrefixHijack", "victim": "198.51.100.0/25", "attacker": 65013,
                     "ixp": "ixp-a", "at": 9}],
    })
    return {
        "id": "S2",
        "description": "Member announces a prefix missing from its whitelist entry",
        "dir": "scenarios/s2",
        "expected": {"attack": "ExactPrefixHijack", "defense": "whitelist", "action": "Reject",
                     "reasons": ["whitelist-violation"], "injected": 1, "detected": 1, "false_positives": 0},
    }


def scenario_s3(root):
    d = os.path.join(root, "s3")
    ixps = ["ixp-a", "ixp-b", "ixp-c", "ixp-d", "ixp-e"]
    routes = []
    # The victim is reachable through four of the five IXPs with one origin.
    for ixp in ixps[1:]:
        routes.append(route(ixp, "203.0.113.0/24", [65020], T0))
    # Background routes spread over all IXPs, some seen at several.
    background = [
        ("192.0.2.0/25", [65031], ["ixp-a", "ixp-b", "ixp-c"]),
        ("192.0.2.128/25", [65032, 65042], ["ixp-b", "ixp-d"]),
        ("198.51.100.0/24", [65033], ["ixp-c", "ixp-d", "ixp-e", "ixp-a"]),
        ("2001:db8:31::/48", [65034], ["ixp-e"]),
        ("2001:db8:32::/48", [65035, 65045], ["ixp-a", "ixp-e"]),
    ]
    for prefix, path, where in background:
        for ixp in where:
            routes.append(route(ixp, prefix, path, T0 + 120))
    links = [[a, b] for i, a in enumerate(ixps) for b in ixps[i + 1:]]
    dump_json(os.path.join(d, "scenario.json"), {
        "seed": 33,
        "ixps": [{"id": ixp} for ixp in ixps],
        "links": links,
        "routes": routes,
        "attacks": [{"kind": "ExactPrefixHijack", "victim": "203.0.113.0/24", "attacker": ATTACKER,
                     "ixp": "ixp-a", "at": len(routes)}],
    })
    return {
        "id": "S3",
        "description": "Hijack seen at one of five federated IXPs, disputed by the other four",
        "dir": "scenarios/s3",
        "expected": {"attack": "ExactPrefixHijack", "defense": "federation", "action": "Flag",
                     "reasons": ["federation-disputed"], "injected": 1, "detected": 1, "false_positives": 0},
    }


def scenario_s4(root):
    d = os.path.join(root, "s4")
    rows = [(origin, prefix, int(prefix.split("/")[1])) for _, origin, prefix in BASE]
    write(os.path.join(d, "roas.csv"), roa_csv(rows))
    members = base_members()
    members[65016] = {"198.51.100.0/24"}
    dump_json(os.path.join(d, "whitelist.json"), whitelist("ixp-a", members))
    routes = base_routes("ixp-a")
    # 198.51.100.0/24 has no ROA but a long, stable history under AS65016.
    for day in range(4):
        routes.append(route("ixp-a", "198.51.100.0/24", [65016], T0 + day * DAY))
    dump_json(os.path.join(d, "scenario.json"), {
        "seed": 44,
        "ixps": [{"id": "ixp-a", "roas": "roas.csv", "whitelists": ["whitelist.json"]}],
        "links": [],
        "routes": routes,
        "attacks": [{"kind": "SubPrefixHijack", "victim": "198.51.100.0/24", "attacker": ATTACKER,
                     "ixp": "ixp-a", "at": len(routes), "time": T0 + 4 * DAY}],
    })
    return {
        "id": "S4",
        "description": "Sub-prefix hijack of a stable prefix without ROAs, flagged by anomaly detection",
        "dir": "scenarios/s4",
        "expected": {"attack": "SubPrefixHijack", "defense": "anomaly", "action": "Flag",
                     "reasons": ["anomaly"], "injected": 1, "detected": 1, "false_positives": 0},
    }


def digest(path):
    with open(path, "rb") as f:
        return hashlib.sha256(f.read()).hexdigest()


def file_entries(data, rels):
    return [{"path": rel, "sha256": digest(os.path.join(data, rel))} for rel in rels]


def main():
    data = sys.argv[1] if len(sys.argv) > 1 else "data"
    root = os.path.join(data, "scenarios")
    fixtures = []
    for build in (scenario_s1, scenario_s2, scenario_s3, scenario_s4):
        info = build(root)
        rels = sorted(os.path.join(info["dir"], name) for name in os.listdir(os.path.join(data, info["dir"])))
        fixtures.append({
            "id": info["id"],
            "description": info["description"],
            "entry": os.path.join(info["dir"], "scenario.json"),
            "files": file_entries(data, rels),
            "expected": info["expected"],
        })

    with open(os.path.join(data, "traces", "reference-counts.json")) as f:
        reference = json.load(f)
    fixtures.append({
        "id": "replay3",
        "description": "Three announcements from one member, one of them a ROA-invalid hijack",
        "entry": "traces/replay3.mrt",
        "roas": "traces/replay3-roas.csv",
        "whitelist": "traces/replay3-whitelist.json",
        "files": file_entries(data, ["traces/replay3.mrt", "traces/replay3-roas.csv",
                                     "traces/replay3-whitelist.json"]),
        "expected": {"announcements": reference["replay3.mrt"]["announcements"],
                     "accept": 2, "reject": 1, "flag": 0},
    })
    fixtures.append({
        "id": "clean",
        "description": "Hijack-free trace with complete ROAs and whitelists",
        "entry": "traces/clean.mrt",
        "roas": "traces/clean-roas.csv",
        "whitelist": "traces/clean-whitelist.json",
        "files": file_entries(data, ["traces/clean.mrt", "traces/clean-roas.csv",
                                     "traces/clean-whitelist.json"]),
        "expected": {"announcements": reference["clean.mrt"]["announcements"],
                     "accept": reference["clean.mrt"]["announcements"], "reject": 0, "flag": 0},
    })
    fixtures.append({
        "id": "collector-sample",
        "description": "Collector-style sample with reference decoder counts",
        "entry": "traces/collector-sample.mrt",
        "files": file_entries(data, ["traces/collector-sample.mrt", "traces/collector-sample.mrt.gz",
                                     "traces/reference-counts.json"]),
        "expected": {"announcements": reference["collector-sample.mrt"]["announcements"]},
    })
    dump_json(os.path.join(data, "manifest.json"), {"version": 1, "fixtures": fixtures})


if __name__ == "__main__":
    main()
