class BaseTool:
    name: str = "base"
    description: str = "Base interface for registered tools."

    def use(self, argument: str) -> str:
        return argument


class FinalTool(BaseTool):
    name: str = "Final"
    description: str = "Return the final answer to the user."

    def use(self, answer: str) -> str:
        final = answer
        return final


class SearchTool(BaseTool):
    name: str = "search"
    description: str = "Search the web for a query and return results."

    def use(self, query: str) -> str:
        results = lookup(query)
        return str(results)


def lookup(query: str):
    return query
