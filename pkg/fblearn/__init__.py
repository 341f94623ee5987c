from .channel import Dist, Dmc, validate_dmc
from .exceptions import FblearnError
from .families import channel_family
from .unittest import TestCase

# Silence pyflakes.
assert Dist and Dmc and validate_dmc and FblearnError and channel_family and TestCase
