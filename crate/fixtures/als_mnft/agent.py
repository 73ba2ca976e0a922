import os
from llm import ChatLLM
from tools import FinalTool, SearchTool

OBSERVATION_TOKEN = "Observation:"
THOUGHT_TOKEN = "Thought:"


class ReactAgent:
    max_loops: int = 5

    def setup(self):
        self.llm = ChatLLM()
        self.tool_by_names = {"Final": FinalTool(), "search": SearchTool()}

    def run(self, question: str):
        num_loops = 0
        previous_responses = []
        generated = ""
        tool = "search"
        tool_input = question
        while num_loops < self.max_loops:
            num_loops += 1
            prompt = question + generated
            try:
                generated = self.llm.generate(prompt, stop=[OBSERVATION_TOKEN])
            except ValueError:
                generated = ""
            if not isinstance(generated, str):
                generated = str(generated)
            tool, tool_input = decide(generated)
            if tool == 'Final':
                return tool_input
            assert isinstance(tool_input, str)
            tool_result = self.tool_by_names[tool].use(tool_input)
            generated += f"\n{OBSERVATION_TOKEN} {tool_result}\n{THOUGHT_TOKEN}"
            previous_responses.append(generated)
        return generated


def decide(generated: str):
    return "search", generated
