from llm import ChatModel
from tools import WeatherTool

STOP_WORD = "Observation:"


class PlannerAgent:
    def __init__(self):
        self.llm = ChatModel()
        self.tools = {"weather": WeatherTool()}

    def step(self, query: str):
        try:
            plan = self.llm.generate(query, stop=[STOP_WORD])
        except ValueError:
            plan = ""
        if not isinstance(plan, str):
            plan = str(plan)
        outcome = self.tools["weather"].run(plan)
        return outcome
