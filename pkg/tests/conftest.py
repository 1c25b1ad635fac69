import hypothesis

hypothesis.settings.register_profile(
    "matprod",
    deadline=None,
    max_examples=60,
    derandomize=True,
    suppress_health_check=[hypothesis.HealthCheck.too_slow],
)
hypothesis.settings.load_profile("matprod")
