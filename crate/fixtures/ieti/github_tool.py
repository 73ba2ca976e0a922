from toolkit import BaseTool


class GitHubAction(BaseTool):
    """Tool for interacting with the GitHub API."""

    mode: str = "issues"
    name: str = ""
    description: str = ""

    def _run(self, query: str) -> str:
        result = self.api_call(self.mode, query)
        return result

    def api_call(self, mode: str, query: str) -> str:
        return fetch(mode, query)


def fetch(mode: str, query: str) -> str:
    return mode + query
