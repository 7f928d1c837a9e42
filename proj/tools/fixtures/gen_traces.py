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
"""Generates the MRT trace fixtures under data/ and their reference counts.

The encoder here is written independently of the C++ decoder. Every file is
decoded again with mrtparse and the counts it reports are what the C++ tests
compare against. Output is deterministic (fixed seeds, gzip mtime=0).

    pip install mrtparse
    python3 tools/fixtures/gen_traces.py data
"""

import gzip
import ipaddress
import json
import random
import struct
import sys
from pathlib import Path

import mrtparse

TD_V2, BGP4MP, BGP4MP_ET = 13, 16, 17
PEER_INDEX_TABLE, RIB_IPV4_UNICAST, RIB_IPV4_MULTICAST, RIB_IPV6_UNICAST = 1, 2, 3, 4
BGP4MP_STATE_CHANGE, BGP4MP_MESSAGE, BGP4MP_MESSAGE_AS4 = 0, 1, 4

# Hand-assembled per RFC 4271 4.3: ORIGIN=IGP, AS_PATH=SEQUENCE[65001],
# NEXT_HOP=192.0.2.1, NLRI=198.51.100.0/24. Shared verbatim with the C++ tests.
UPDATE_SIMPLE_HEX = (
    "ffffffffffffffffffffffffffffffff"  # marker
    "002f"  # length 47
    "02"  # UPDATE
    "0000"  # withdrawn routes length
    "0014"  # total path attribute length 20
    "40010100"  # ORIGIN IGP
    "40020602010000fde9"  # AS_PATH SEQUENCE(1) 65001
    "400304c0000201"  # NEXT_HOP 192.0.2.1
    "18c63364"  # 198.51.100.0/24
)

UPDATE_EOR_HEX = "ffffffffffffffffffffffffffffffff" "0017" "02" "0000" "0000"

# PEER_INDEX_TABLE with two AS4 IPv4 peers: 65010 and 65011.
PEER_INDEX_HEX = (
    "c0000201"  # collector BGP id
    "0000"  # view name length
    "0002"  # peer count
    "02" "0a000001" "c0000205" "0000fdf2"  # AS4|IPv4, id, 192.0.2.5, AS65010
    "02" "0a000002" "c0000206" "0000fdf3"  # AS4|IPv4, id, 192.0.2.6, AS65011
)

# RIB_IPV4_UNICAST 203.0.113.0/24, one entry, peer 0, path SEQUENCE[65010,65020].
RIB_IPV4_HEX = (
    "00000000"  # sequence
    "18" "cb0071"  # 203.0.113.0/24
    "0001"  # entry count
    "0000"  # peer index
    "5f5e1000"  # originated time 1600000000
    "0018"  # attribute length 24
    "40010100"
    "40020a02020000fdf20000fdfc"
    "400304c0000201"
)


def u8(v):
    return struct.pack("!B", v)


def u16(v):
    return struct.pack("!H", v)


def u32(v):
    return struct.pack("!I", v)


def mrt_record(ts, mtype, subtype, payload):
    return u32(ts) + u16(mtype) + u16(subtype) + u32(len(payload)) + payload


def nlri(prefix):
    net = ipaddress.ip_network(prefix)
    nbytes = (net.prefixlen + 7) // 8
    return u8(net.prefixlen) + net.network_address.packed[:nbytes]


def attr(flags, code, value):
    if len(value) > 255:
        return u8(flags | 0x10) + u8(code) + u16(len(value)) + value
    return u8(flags) + u8(code) + u8(len(value)) + value


def as_path_attr(segments, asn_size):
    body = b""
    for seg_type, asns in segments:
        body += u8(seg_type) + u8(len(asns))
        for a in asns:
            body += u32(a) if asn_size == 4 else u16(a)
    return attr(0x40, 2, body)


def origin_attr(v=0):
    return attr(0x40, 1, u8(v))


def next_hop_attr(addr):
    return attr(0x40, 3, ipaddress.ip_address(addr).packed)


def med_attr(v):
    return attr(0x80, 4, u32(v))


def community_attr(values):
    return attr(0xC0, 8, b"".join(u32(v) for v in values))


def large_community_attr(values):
    return attr(0xC0, 32, b"".join(u32(a) + u32(b) + u32(c) for a, b, c in values))


def mp_reach_attr(next_hop, prefixes):
    body = u16(2) + u8(1) + u8(16) + ipaddress.ip_address(next_hop).packed + u8(0)
    body += b"".join(nlri(p) for p in prefixes)
    return attr(0x80, 14, body)


def mp_unreach_attr(prefixes):
    body = u16(2) + u8(1) + b"".join(nlri(p) for p in prefixes)
    return attr(0x80, 15, body)


def mp_reach_abbrev_attr(next_hop):
    body = u8(16) + ipaddress.ip_address(next_hop).packed
    return attr(0x80, 14, body)


def bgp_update(withdrawn, attrs, announced):
    wd = b"".join(nlri(p) for p in withdrawn)
    pa = b"".join(attrs)
    nl = b"".join(nlri(p) for p in announced)
    body = u16(len(wd)) + wd + u16(len(pa)) + pa + nl
    return b"\xff" * 16 + u16(19 + len(body)) + u8(2) + body


def bgp_keepalive():
    return b"\xff" * 16 + u16(19) + u8(4)


def bgp4mp_header(peer_as, local_as, peer_ip, local_ip, as4):
    pip = ipaddress.ip_address(peer_ip)
    lip = ipaddress.ip_address(local_ip)
    afi = 1 if pip.version == 4 else 2
    pack_as = u32 if as4 else u16
    return pack_as(peer_as) + pack_as(local_as) + u16(0) + u16(afi) + pip.packed + lip.packed


class Peer:
    def __init__(self, index, asn, ip, as4):
        self.index, self.asn, self.ip, self.as4 = index, asn, ip, as4


def peer_index_table(peers, view=b"sample"):
    body = ipaddress.ip_address("192.0.2.250").packed + u16(len(view)) + view + u16(len(peers))
    for p in peers:
        addr = ipaddress.ip_address(p.ip)
        ptype = (0x01 if addr.version == 6 else 0) | (0x02 if p.as4 else 0)
        body += u8(ptype) + u32(0x0A000000 + p.index) + addr.packed
        body += u32(p.asn) if p.as4 else u16(p.asn)
    return body


def rib_record(seq, prefix, entries):
    """entries: list of (peer_index, originated_time, attr bytes)."""
    body = u32(seq) + nlri(prefix) + u16(len(entries))
    for peer_index, otime, attrs in entries:
        pa = b"".join(attrs)
        body += u16(peer_index) + u32(otime) + u16(len(pa)) + pa
    return body


def v4_blocks(rng, count, min_len=25, max_len=28):
    """Non-overlapping IPv4 prefixes carved from the documentation /24s."""
    bases = ["192.0.2.0/24", "198.51.100.0/24", "203.0.113.0/24"]
    out = []
    for base in bases:
        for sub in ipaddress.ip_network(base).subnets(new_prefix=28):
            out.append(sub)
    rng.shuffle(out)
    chosen = []
    for net in out[:count]:
        length = rng.randint(min_len, max_len)
        chosen.append(str(net.supernet(new_prefix=length) if length < 28 else net))
    # Distinct and non-overlapping: keep the first occurrence of each supernet.
    seen, result = set(), []
    for p in chosen:
        n = ipaddress.ip_network(p)
        if any(n.overlaps(ipaddress.ip_network(q)) for q in seen):
            continue
        seen.add(p)
        result.append(p)
    return result


def v6_blocks(rng, count):
    """Non-overlapping IPv6 prefixes inside 2001:db8::/32."""
    out = []
    while len(out) < count:
        length = rng.choice([36, 40, 44, 48])
        raw = (0x20010DB8 << 96) | rng.getrandbits(96)
        net = ipaddress.ip_network((raw, 128)).supernet(new_prefix=length)
        if any(net.overlaps(o) for o in out):
            continue
        out.append(net)
    return sorted(str(n) for n in out)


# ----------------------------------------------------------------------------
# Reference counting with mrtparse


def reference_counts(path):
    records = announcements = withdrawals = updates = errors = 0
    for entry in mrtparse.Reader(str(path)):
        records += 1
        if entry.err:
            errors += 1
            continue
        d = entry.data
        mtype = list(d["type"])[0]
        subtype = list(d["subtype"])[0]
        if mtype == TD_V2 and subtype in (RIB_IPV4_UNICAST, RIB_IPV6_UNICAST):
            announcements += len(d["rib_entries"])
        elif mtype in (BGP4MP, BGP4MP_ET) and subtype in (BGP4MP_MESSAGE, BGP4MP_MESSAGE_AS4):
            msg = d["bgp_message"]
            if list(msg["type"])[0] != 2:
                continue
            updates += 1
            withdrawals += len(msg["withdrawn_routes"])
            announcements += len(msg["nlri"])
            for a in msg["path_attributes"]:
                code = list(a["type"])[0]
                if code == 14:
                    announcements += len(a["value"].get("nlri", []))
                elif code == 15:
                    withdrawals += len(a["value"].get("withdrawn_routes", []))
    return {
        "records": records,
        "announcements": announcements,
        "withdrawals": withdrawals,
        "updates": updates,
        "reference_errors": errors,
    }


def decode_all(buf):
    """mrtparse.Reader yields itself; copy each record's data out."""
    import copy
    import io

    return [copy.deepcopy(e.data) for e in mrtparse.Reader(io.BytesIO(buf))]


def check_hand_fixtures():
    """Cross-checks the hand-assembled byte fixtures with mrtparse."""
    upd = bytes.fromhex(UPDATE_SIMPLE_HEX)
    assert len(upd) == 47
    hdr = bgp4mp_header(65001, 65000, "192.0.2.1", "192.0.2.254", True)
    buf = mrt_record(1600000000, BGP4MP, BGP4MP_MESSAGE_AS4, hdr + upd)
    msg = decode_all(buf)[0]["bgp_message"]
    assert msg["nlri"] == [{"length": 24, "prefix": "198.51.100.0"}], msg["nlri"]
    attrs = {list(a["type"])[0]: a["value"] for a in msg["path_attributes"]}
    assert list(attrs[1]) == [0]
    assert attrs[2][0]["value"] == ["65001"], attrs[2]
    assert attrs[3] == "192.0.2.1"

    eor = bytes.fromhex(UPDATE_EOR_HEX)
    buf = mrt_record(1600000000, BGP4MP, BGP4MP_MESSAGE_AS4, hdr + eor)
    msg = decode_all(buf)[0]["bgp_message"]
    assert msg["nlri"] == [] and msg["withdrawn_routes"] == []

    buf = mrt_record(1600000000, TD_V2, PEER_INDEX_TABLE, bytes.fromhex(PEER_INDEX_HEX))
    buf += mrt_record(1600000000, TD_V2, RIB_IPV4_UNICAST, bytes.fromhex(RIB_IPV4_HEX))
    entries = decode_all(buf)
    peers = entries[0]["peer_entries"]
    assert [p["peer_as"] for p in peers] == ["65010", "65011"], peers
    rib = entries[1]
    assert rib["prefix"] == "203.0.113.0" and rib["length"] == 24
    assert rib["rib_entries"][0]["peer_index"] == 0
    path = [a for a in rib["rib_entries"][0]["path_attributes"] if list(a["type"])[0] == 2]
    assert path[0]["value"][0]["value"] == ["65010", "65020"]


# ----------------------------------------------------------------------------
# Fixtures


def make_collector_sample(rng):
    """Collector-style trace: RIB dump then an update stream, mixed encodings."""
    peers = [
        Peer(0, 64600, "192.0.2.10", False),
        Peer(1, 64601, "192.0.2.11", True),
        Peer(2, 4200000010, "192.0.2.12", True),
        Peer(3, 64603, "2001:db8:ffff::3", True),
        Peer(4, 4200000020, "2001:db8:ffff::4", True),
        Peer(5, 64605, "192.0.2.15", True),
        Peer(6, 64606, "192.0.2.16", False),
        Peer(7, 65100, "2001:db8:ffff::7", True),
    ]
    transit = [64700 + i for i in range(12)] + [4200001000 + i for i in range(4)]
    origins = [65000 + i for i in range(40)] + [4200002000 + i for i in range(10)]
    v4 = v4_blocks(rng, 160)
    v6 = v6_blocks(rng, 60)
    t0 = 1700000000
    out = bytearray()
    out += mrt_record(t0, TD_V2, PEER_INDEX_TABLE, peer_index_table(peers))

    def random_path(peer):
        mid = rng.sample(transit, rng.randint(0, 3))
        origin = rng.choice(origins)
        segs = [(2, [peer.asn] + mid + [origin])]
        if rng.random() < 0.05:
            segs.append((1, [origin, rng.choice(origins)]))
        if rng.random() < 0.05:
            segs[0] = (2, [peer.asn, peer.asn] + mid + [origin])
        return segs

    seq = 0
    for prefix in v4:
        entries = []
        for peer in rng.sample(peers, rng.randint(1, 5)):
            attrs = [origin_attr(rng.choice([0, 0, 2])), as_path_attr(random_path(peer), 4),
                     next_hop_attr("192.0.2.%d" % (10 + peer.index))]
            if rng.random() < 0.3:
                attrs.append(med_attr(rng.randint(0, 500)))
            if rng.random() < 0.3:
                attrs.append(community_attr([(65000 << 16) | rng.randint(1, 999)]))
            entries.append((peer.index, t0 - rng.randint(0, 86400 * 30), attrs))
        out += mrt_record(t0, TD_V2, RIB_IPV4_UNICAST, rib_record(seq, prefix, entries))
        seq += 1
        if seq % 53 == 0:
            # Multicast RIB entries are not decoded; they exercise the skip path.
            out += mrt_record(t0, TD_V2, RIB_IPV4_MULTICAST, rib_record(seq, prefix, entries[:1]))
            seq += 1
    for prefix in v6:
        entries = []
        for peer in rng.sample(peers, rng.randint(1, 4)):
            attrs = [origin_attr(0), as_path_attr(random_path(peer), 4),
                     mp_reach_abbrev_attr("2001:db8:ffff::%x" % peer.index)]
            if rng.random() < 0.2:
                attrs.append(large_community_attr([(4200000000, 1, rng.randint(1, 50))]))
            entries.append((peer.index, t0 - rng.randint(0, 86400 * 30), attrs))
        out += mrt_record(t0, TD_V2, RIB_IPV6_UNICAST, rib_record(seq, prefix, entries))
        seq += 1

    ts = t0 + 60
    for i in range(520):
        ts += rng.randint(0, 3)
        peer = rng.choice(peers)
        as4 = True if peer.asn > 0xFFFF else rng.random() < 0.7
        mtype = BGP4MP_ET if rng.random() < 0.5 else BGP4MP
        subtype = BGP4MP_MESSAGE_AS4 if as4 else BGP4MP_MESSAGE
        peer_ip = peer.ip
        local_ip = "2001:db8:ffff::fe" if ":" in peer_ip else "192.0.2.254"
        header = bgp4mp_header(peer.asn, 64512, peer_ip, local_ip, as4)
        roll = rng.random()
        if roll < 0.04:
            # STATE_CHANGE (Established -> Idle)
            state = header + u16(6) + u16(1)
            st = 5 if as4 else BGP4MP_STATE_CHANGE
            payload = state
            if mtype == BGP4MP_ET:
                payload = u32(rng.randint(0, 999999)) + payload
            out += mrt_record(ts, mtype, st, payload)
            continue
        if roll < 0.08:
            msg = bgp_keepalive()
        elif roll < 0.30 and ":" not in peer_ip:
            withdrawn = rng.sample(v4, rng.randint(1, 3))
            msg = bgp_update(withdrawn, [], [])
        elif roll < 0.36:
            msg = bgp_update([], [attr(0x80, 15, u16(2) + u8(1) + b"".join(nlri(p) for p in rng.sample(v6, 2)))], [])
        elif roll < 0.55:
            segs = random_path(peer)
            if not as4:
                segs = [(t, [a if a <= 0xFFFF else 23456 for a in asns]) for t, asns in segs]
            attrs = [origin_attr(0), as_path_attr(segs, 4 if as4 else 2),
                     mp_reach_attr("2001:db8:ffff::%x" % peer.index, rng.sample(v6, rng.randint(1, 3)))]
            msg = bgp_update([], attrs, [])
        else:
            segs = random_path(peer)
            if not as4:
                segs = [(t, [a if a <= 0xFFFF else 23456 for a in asns]) for t, asns in segs]
            attrs = [origin_attr(0), as_path_attr(segs, 4 if as4 else 2),
                     next_hop_attr("192.0.2.%d" % (10 + peer.index))]
            if not as4 and rng.random() < 0.5:
                attrs.append(attr(0xC0, 17, b"".join(u8(t) + u8(len(a)) + b"".join(u32(x) for x in a)
                                                     for t, a in random_path(peer))))
            if rng.random() < 0.4:
                attrs.append(community_attr([(64512 << 16) | 100, (64512 << 16) | 200]))
            withdrawn = rng.sample(v4, rng.randint(0, 1)) if ":" not in peer_ip else []
            msg = bgp_update(withdrawn, attrs, rng.sample(v4, rng.randint(1, 4)))
        payload = header + msg
        if mtype == BGP4MP_ET:
            payload = u32(rng.randint(0, 999999)) + payload
        out += mrt_record(ts, mtype, subtype, payload)
    return bytes(out)


def make_clean(rng, out_dir):
    """Clean trace: one origin per prefix, complete ROAs and whitelists."""
    members = [64520 + i for i in range(6)]
    transit = [64800 + i for i in range(5)]
    prefixes = v4_blocks(rng, 120, 25, 27) + v6_blocks(rng, 30)
    truth = {}
    for p in prefixes:
        origin = 65200 + rng.randint(0, 30)
        truth[p] = origin
    # Fixed per-(member, origin) path so that replayed updates never add an edge.
    paths = {}
    for m in members:
        for o in set(truth.values()):
            mid = rng.sample(transit, rng.randint(0, 2))
            paths[(m, o)] = [m] + mid + [o]
    peers = [Peer(i, m, "192.0.2.%d" % (100 + i), True) for i, m in enumerate(members)]
    t0 = 1700000000
    out = bytearray(mrt_record(t0, TD_V2, PEER_INDEX_TABLE, peer_index_table(peers, b"clean")))
    announced = {m: set() for m in members}
    seq = 0
    rib_count = 0
    for p in prefixes:
        v6 = ":" in p
        entries = []
        for peer in rng.sample(peers, rng.randint(3, 6)):
            nh = mp_reach_abbrev_attr("2001:db8:ffff::1") if v6 else next_hop_attr(peer.ip)
            entries.append((peer.index, t0 - 86400 * 3,
                            [origin_attr(0), as_path_attr([(2, paths[(peer.asn, truth[p])])], 4), nh]))
            announced[peer.asn].add(p)
        rib_count += len(entries)
        out += mrt_record(t0, TD_V2, RIB_IPV6_UNICAST if v6 else RIB_IPV4_UNICAST, rib_record(seq, p, entries))
        seq += 1
    ts = t0 + 10
    update_count = 0
    pairs = sorted((m, p) for m in members for p in announced[m])
    while update_count < 900:
        m, p = pairs[rng.randrange(len(pairs))]
        peer = peers[members.index(m)]
        segs = [(2, paths[(m, truth[p])])]
        if ":" in p:
            attrs = [origin_attr(0), as_path_attr(segs, 4), mp_reach_attr("2001:db8:ffff::1", [p])]
            msg = bgp_update([], attrs, [])
        else:
            attrs = [origin_attr(0), as_path_attr(segs, 4), next_hop_attr(peer.ip)]
            msg = bgp_update([], attrs, [p])
        header = bgp4mp_header(m, 64512, peer.ip, "192.0.2.254", True)
        out += mrt_record(ts, BGP4MP, BGP4MP_MESSAGE_AS4, header + msg)
        update_count += 1
        ts += 1

    roas = ["ASN,IP Prefix,Max Length,Trust Anchor"]
    for p in prefixes:
        n = ipaddress.ip_network(p)
        roas.append("AS%d,%s,%d,ta-fixture" % (truth[p], p, n.prefixlen))
    (out_dir / "clean-roas.csv").write_text("\n".join(roas) + "\n")
    wl = {"ixp": "ixp-clean", "version": 1,
          "members": [{"asn": m, "prefixes": sorted(announced[m])} for m in members]}
    (out_dir / "clean-whitelist.json").write_text(json.dumps(wl, indent=2) + "\n")
    return bytes(out), rib_count + update_count


def make_replay3(out_dir):
    """Three announcements from one member; the third is an origin hijack."""
    peers = [Peer(0, 65010, "192.0.2.5", True)]
    t0 = 1700000000
    out = bytearray(mrt_record(t0, TD_V2, PEER_INDEX_TABLE, peer_index_table(peers, b"replay")))
    routes = [("198.51.100.0/24", [65010, 65020]),
              ("203.0.113.0/24", [65010, 65020]),
              ("192.0.2.0/24", [65010, 64999])]
    for seq, (p, path) in enumerate(routes):
        attrs = [origin_attr(0), as_path_attr([(2, path)], 4), next_hop_attr("192.0.2.5")]
        out += mrt_record(t0, TD_V2, RIB_IPV4_UNICAST, rib_record(seq, p, [(0, t0, attrs)]))
    (out_dir / "replay3-roas.csv").write_text(
        "ASN,IP Prefix,Max Length,Trust Anchor\n"
        "AS65020,198.51.100.0/24,24,ta-fixture\n"
        "AS65020,203.0.113.0/24,24,ta-fixture\n"
        "AS65030,192.0.2.0/24,24,ta-fixture\n")
    wl = {"ixp": "ixp-replay", "version": 1,
          "members": [{"asn": 65010, "prefixes": [p for p, _ in routes]}]}
    (out_dir / "replay3-whitelist.json").write_text(json.dumps(wl, indent=2) + "\n")
    return bytes(out)


def main():
    root = Path(sys.argv[1] if len(sys.argv) > 1 else "data")
    traces = root / "traces"
    traces.mkdir(parents=True, exist_ok=True)
    check_hand_fixtures()

    sample = make_collector_sample(random.Random(20170601))
    (traces / "collector-sample.mrt").write_bytes(sample)
    with open(traces / "collector-sample.mrt.gz", "wb") as raw:
        with gzip.GzipFile(filename="", mode="wb", fileobj=raw, mtime=0) as gz:
            gz.write(sample)

    clean, clean_announcements = make_clean(random.Random(7), traces)
    (traces / "clean.mrt").write_bytes(clean)
    (traces / "replay3.mrt").write_bytes(make_replay3(traces))

    expected = {}
    for name in ("collector-sample.mrt", "collector-sample.mrt.gz", "clean.mrt", "replay3.mrt"):
        expected[name] = reference_counts(traces / name)
    assert expected["clean.mrt"]["announcements"] == clean_announcements
    assert expected["replay3.mrt"]["announcements"] == 3
    (traces / "reference-counts.json").write_text(json.dumps(expected, indent=2, sort_keys=True) + "\n")
    print(json.dumps(expected, indent=2, sort_keys=True))


if __name__ == "__main__":
    main()
