import os

from openai import OpenAI


class ChatModel:
    """Thin wrapper over the chat-completions API."""

    model_name: str = "gpt-4o"

    def generate(self, prompt: str, stop=None):
        client = OpenAI(api_key=os.environ.get("OPENAI_API_KEY"))
        response = client.chat.completions.create(
            model=self.model_name,
            messages=[{"role": "user", "content": prompt}],
            stop=stop,
        )
        return response.choices[0].message.content
