from bvwave.utils._compact import distribution_version


__version__ = distribution_version("bvwave")
