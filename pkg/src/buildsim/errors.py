"""Exception hierarchy shared across the simulation modules."""


class BuildSimError(Exception):
    """Base class for all errors raised by buildsim."""


class ConfigError(BuildSimError, ValueError):
    """Invalid or inconsistent configuration."""


class WeatherError(BuildSimError, ValueError):
    """Base class for weather ingestion problems."""


class WeatherParseError(WeatherError):
    """Syntactically malformed weather file."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class WeatherSchemaError(WeatherError):
    """A mandatory column is missing."""


class WeatherValidationError(WeatherError):
    """Parsed data violates series invariants (spacing, ranges, missing values)."""


class WeatherRangeError(WeatherError):
    """Requested time lies outside the series horizon."""


class SimulationError(BuildSimError, RuntimeError):
    """Failure during a simulation run, tagged with scenario code and step index."""

    def __init__(self, message: str, code: str | None = None, step: int | None = None):
        self.code = code
        self.step = step
        where = []
        if code is not None:
            where.append(f"scenario {code}")
        if step is not None:
            where.append(f"step {step}")
        if where:
            message = f"{', '.join(where)}: {message}"
        super().__init__(message)
