import jax

# Every tolerance in the package presumes complex128 / float64.
jax.config.update("jax_enable_x64", True)
