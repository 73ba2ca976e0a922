from langroid.agent.tool_message import ToolMessage


class SegmentExtractTool(ToolMessage):
    request: str = "segment_extract"
    name: str = "segment_extract"
    description: str = "Extract numbered segments from a body of text."

    @classmethod
    def instructions(cls) -> str:
        return
        """
        Use this tool to indicate segments from a body of text
        containing numbered segments.
        """

    def segments(self, text: str) -> str:
        return extract(text)


def extract(text: str) -> str:
    return text
