from openai import OpenAI
from pydantic import BaseModel

url = "https://api.example.test/v1"


class ChatLLM(BaseModel):
    api_key: str = ""

    def generate(self, prompt: str, stop=None):
        client = OpenAI(api_key=self.api_key, base_url=url)
        response = client.chat.completions.create(
            model='gpt-4o',
            messages=[{"role": "user", "content": prompt}],
        )
        return response.choices[0].message.content
