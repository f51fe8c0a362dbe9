"""Epoch-indexed difficulty schedule for colorful cutout.

With the defaults the erasure box is split into ``2 ** epoch`` sub-regions:
one solid patch at epoch 0, then 2, 4, 8, 16, ...  Counts saturate at
``max_regions`` and at the largest count the box can be bisected into without
splitting a one-pixel extent.

``base`` and ``growth_factor`` generalize the doubling rule for schedule
sweeps; both must be powers of two because sub-regions come from recursive
bisection.
"""

from dataclasses import asdict, dataclass, fields

from .exceptions import InvalidParameterError
from .validation import check_positive_int


def is_power_of_two(n):
    return n >= 1 and n & (n - 1) == 0


def bisection_fits(n_regions, width, height):
    """Whether ``width x height`` can be bisected into ``n_regions`` tiles.

    Bisection alternates vertical and horizontal cuts starting with vertical,
    which lays the tiles out on a grid of ``2**ceil(k/2)`` columns by
    ``2**floor(k/2)`` rows for ``n_regions = 2**k``.
    """
    k = n_regions.bit_length() - 1
    return (1 << ((k + 1) // 2)) <= width and (1 << (k // 2)) <= height


@dataclass(frozen=True)
class DifficultyParams:
    n_regions: int
    box: int


@dataclass(frozen=True)
class CurriculumSchedule:
    """Maps an epoch index to the number of sub-regions of the erasure box.

    Parameters
    ----------
    base : int
        Sub-regions at epoch 0.
    growth_factor : int
        Multiplier applied per epoch.
    max_regions : int
        Saturation cap; must equal ``base * growth_factor ** j`` for some j.
    box : int
        Side length of the square erasure box in pixels.
    """

    base: int = 1
    growth_factor: int = 2
    max_regions: int = 256
    box: int = 32

    def __post_init__(self):
        for f in fields(self):
            check_positive_int(getattr(self, f.name), f.name)
        if not is_power_of_two(self.base):
            raise InvalidParameterError(f"base must be a power of two, got {self.base}")
        if not is_power_of_two(self.growth_factor):
            raise InvalidParameterError(
                f"growth_factor must be a power of two, got {self.growth_factor}"
            )
        if not _in_power_form(self.max_regions, self.base, self.growth_factor):
            raise InvalidParameterError(
                f"max_regions must be base * growth_factor**j, got {self.max_regions}"
            )
        if not bisection_fits(self.base, self.box, self.box):
            raise InvalidParameterError(
                f"a {self.box}x{self.box} box cannot hold {self.base} sub-regions"
            )

    def region_cap(self):
        """Largest count this schedule can ever return."""
        cap = self.base
        if self.growth_factor == 1:
            return cap
        while cap < self.max_regions and bisection_fits(
            cap * self.growth_factor, self.box, self.box
        ):
            cap *= self.growth_factor
        return cap

    def regions_for_epoch(self, epoch):
        epoch = check_positive_int(epoch, "epoch", minimum=0)
        cap = self.region_cap()
        n = self.base
        for _ in range(epoch):
            if n >= cap:
                break
            n *= self.growth_factor
        return n

    def params_for_epoch(self, epoch):
        return DifficultyParams(n_regions=self.regions_for_epoch(epoch), box=self.box)

    def to_dict(self):
        return asdict(self)

    @classmethod
    def from_dict(cls, data):
        return cls(**data)


def _in_power_form(value, base, growth):
    n = base
    while n < value and growth > 1:
        n *= growth
    return n == value


def regions_for_epoch(schedule, epoch):
    """Number of sub-regions at ``epoch``; non-decreasing and saturating."""
    return schedule.regions_for_epoch(epoch)


def params_for_epoch(schedule, epoch):
    return schedule.params_for_epoch(epoch)
