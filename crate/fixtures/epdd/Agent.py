from pydantic import BaseModel
from Tools.Python_repl import PythonREPL


class Agent(BaseModel):
    name: str = "runner"

    def describe(self) -> str:
        return self.name
