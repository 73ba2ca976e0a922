import os
from llm import ChatModel
from toolkit import CalculatorTool

STOP_TOKEN = "Observation:"


class TaskAgent:
    """Coordinates the model and registered tools to answer questions."""

    def __init__(self):
        self.llm = ChatModel()
        self.tools = {"calculator": CalculatorTool()}

    def answer(self, question: str) -> str:
        try:
            plan = self.llm.generate(question, stop=[STOP_TOKEN])
        except ValueError:
            plan = ""
        if not isinstance(plan, str):
            plan = str(plan)
        try:
            result = self.tools["calculator"].run(plan)
        except KeyError:
            result = ""
        if not isinstance(result, str):
            result = str(result)
        return result
