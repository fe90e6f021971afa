import json

from cryptography.hazmat.backends import default_backend
from cryptography.hazmat.primitives import hashes


def canonical_json(payload) -> bytes:
    """Sorted keys, no whitespace."""
    return json.dumps(payload, sort_keys=True, separators=(",", ":"), ensure_ascii=False).encode()


def sha256_hex(data: bytes) -> str:
    """
    Hex SHA-256 of raw bytes.
    """
    if not isinstance(data, (bytes, bytearray)):
        raise ValueError("Digest input must be bytes.")
    digest = hashes.Hash(hashes.SHA256(), backend=default_backend())
    digest.update(bytes(data))
    return digest.finalize().hex()


def payload_digest(payload) -> str:
    return sha256_hex(canonical_json(payload))
