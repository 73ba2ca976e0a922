from langchain.agents import initialize_agent
from langchain.llms import FakeListLLM
from tools import build_tools

llmm = FakeListLLM(responses=["Final Answer: done"])
tools = build_tools()

agent = initialize_agent(
    tools=tools,
    llm=llmm,
    agent="zero-shot-react-description",
    verbose=True,
    handle_parsing_error=False,
)
