class WeatherTool:
    name: str = "weather"
    description: str = "Look up the current weather for a location."

    def run(self, location: str) -> str:
        report = format_report(location)
        return report


def format_report(location: str) -> str:
    return "sunny in " + location
