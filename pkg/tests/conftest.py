from hypothesis import HealthCheck, settings

# derandomized so that repeated runs of the suite are identical
settings.register_profile(
    "msel",
    derandomize=True,
    deadline=None,
    max_examples=60,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("msel")
