"""SCMAtools - uplink SCMA constellation analysis and link simulation."""
