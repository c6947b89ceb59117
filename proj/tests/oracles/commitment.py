"""Reference pseudonym commitment: SHA-256 over a u32 length-prefixed id and the nonce."""
import hashlib
import struct

rid = b"reporter-01"
nonce = bytes(range(32))
print(hashlib.sha256(struct.pack("<I", len(rid)) + rid + nonce).hexdigest())
