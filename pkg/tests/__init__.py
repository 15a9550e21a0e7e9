# Intentionally empty: marks tests as a package for unittest discovery.


