"""Built-in dataset synthesizers."""

from avtrace.synthesizers.fingerprint import MANIFEST_FILE, FingerprintSynthesizer, generate_synthetic

__all__ = ["MANIFEST_FILE", "FingerprintSynthesizer", "generate_synthetic"]
