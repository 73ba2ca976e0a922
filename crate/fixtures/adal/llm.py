from pydantic import BaseModel


class ChatLLM(BaseModel):
    temperature: float = 0.6

    def generate(self, prompt: str, stop=None):
        response = client.chat.completions.create(
            model="file_path/StarCoder",
            messages=[{"role": "user", "content": prompt}],
            temperature=self.temperature,
        )
        return response.choices[0].message.content
