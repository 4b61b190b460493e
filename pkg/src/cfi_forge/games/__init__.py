from .pebble import pebble_value, pebble_value_fixed_point, INFINITY
from .blocking import blocking_value, BlockingGame, DuplicatorBlockingStrategy
from .prover_delayer import prover_delayer_value, verify_delayer_floor

# .transfer is imported on demand; it depends on the cops-and-robber engine,
# which in turn imports this package.

__all__ = [
    "pebble_value", "pebble_value_fixed_point", "blocking_value",
    "BlockingGame", "DuplicatorBlockingStrategy", "prover_delayer_value",
    "verify_delayer_floor", "INFINITY",
]
