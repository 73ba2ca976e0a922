from pydantic import BaseModel
from agenttools import BaseTool


class PythonREPL(BaseTool, BaseModel):
    name: str = "python_repl"
    description: str = "Run python code in a sandboxed repl and return the output."

    def _run(self, code: str) -> str:
        output = evaluate(code)
        return output


def evaluate(code: str) -> str:
    return str(code)
