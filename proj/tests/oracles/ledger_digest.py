"""Reference block digests, computed without the C++ code.

Re-implements the canonical transaction encoding with struct/hashlib and
prints the digests frozen into test_ledger.cpp.
"""
import hashlib
import struct


def u8(v): return struct.pack("<B", v)
def u32(v): return struct.pack("<I", v)
def u64(v): return struct.pack("<Q", v)
def f64(v): return struct.pack("<d", v)
def s(text): b = text.encode(); return u32(len(b)) + b
def opt(text): return u8(0) if text is None else u8(1) + s(text)
def strs(items): return u32(len(items)) + b"".join(s(i) for i in items)


def tx(tx_id, kind, article, actor, ts, payload):
    return u64(tx_id) + u8(kind) + opt(article) + opt(actor) + u64(ts) + payload


def txs_hash(encoded):
    body = u64(len(encoded)) + b"".join(u32(len(e)) + e for e in encoded)
    return hashlib.sha256(body).digest()


def block_hash(height, prev, th):
    return hashlib.sha256(u64(height) + prev + th).digest()


ZERO = bytes(32)

# Empty genesis.
g0_txs = txs_hash([])
g0 = block_hash(0, ZERO, g0_txs)
print("empty genesis txs_hash ", g0_txs.hex())
print("empty genesis block    ", g0.hex())

# Genesis holding one Register transaction.
reg = tx(0, 0, None, "alice", 0, strs(["reporter"]) + strs([]) + strs([]) + f64(0.5))
g1_txs = txs_hash([reg])
g1 = block_hash(0, ZERO, g1_txs)
print("register genesis block ", g1.hex())

# Block 1 on top: a Resolution (truth authentic = 1) at tick 7.
res = tx(1, 6, "art-1", None, 7, u8(1))
b1 = block_hash(1, g1, txs_hash([res]))
print("resolution block 1     ", b1.hex())
