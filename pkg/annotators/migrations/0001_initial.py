# Generated by Django 5.1.5 on 2026-10-18 09:12

from django.db import migrations, models


class Migration(migrations.Migration):

    initial = True

    dependencies = [
    ]

    operations = [
        migrations.CreateModel(
            name='CachedResponse',
            fields=[
                ('id', models.BigAutoField(auto_created=True, primary_key=True, serialize=False, verbose_name='ID')),
                ('backend_id', models.CharField(max_length=64)),
                ('model_name', models.CharField(blank=True, default='', max_length=255)),
                ('prompt_hash', models.CharField(max_length=64)),
                ('raw_text', models.TextField(blank=True)),
                ('latency_ms', models.FloatField(default=0.0)),
                ('created_at', models.DateTimeField(auto_now_add=True)),
            ],
            options={
                'constraints': [models.UniqueConstraint(fields=('backend_id', 'model_name', 'prompt_hash'), name='unique_cached_response')],
            },
        ),
    ]
