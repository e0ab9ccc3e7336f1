class ConfigurationError(ValueError):
    """Invalid scenario, radio, or search-region parameters."""


class ScenarioParseError(ValueError):
    """Scenario file is not well-formed."""

    def __init__(self, message, line=None, field=None):
        self.line = line
        self.field = field
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field is not None:
            where.append(f"field {field}")
        super().__init__(f"{', '.join(where)}: {message}" if where else message)
