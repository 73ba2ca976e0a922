class CalculatorTool:
    """Evaluates arithmetic expressions for the agent."""

    name: str = "calculator"
    description: str = "Evaluate an arithmetic expression and return the numeric result."

    def run(self, expression: str) -> str:
        value = compute(expression)
        return str(value)


def compute(expression: str) -> float:
    total = float(eval(expression))
    return total
