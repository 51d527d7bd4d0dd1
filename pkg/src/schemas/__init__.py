# Pydantic schemas/models package 